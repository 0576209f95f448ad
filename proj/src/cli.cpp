#include "sparsecand/cli.hpp"

#include "sparsecand/dataset.hpp"
#include "sparsecand/error.hpp"
#include "sparsecand/network.hpp"
#include "sparsecand/sparse_candidate.hpp"
#include "sparsecand/synth.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <string>

namespace sparsecand {

namespace {

struct Options {
    std::string data, net, ref, out, report = "report.tsv";
    std::string method = "sc", maximizer = "greedy", measure = "score", score = "bde", stop = "score";
    std::size_t k = 5;
    double ess = 10.0;
    std::size_t tabu = 100, patience = 15, max_iters = 20, mc = 1000, kl_samples = 20000;
    std::uint64_t seed = 0;
    std::size_t vars = 37, max_parents = 4, n = 10000;
    bool max_parents_set = false;
};

std::string shortest(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

// Writes through `emit` to a file, or to `out` for "-".
template <class F>
void write_output(const std::string& path, std::ostream& out, F emit) {
    if (path == "-") {
        emit(out);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    emit(f);
    if (!f) throw ParseError("write to " + path + " failed");
}

ScoreConfig score_config(const Options& o) {
    return {o.score == "mdl" ? ScoreKind::MDL : ScoreKind::BDe, o.ess};
}

int cmd_learn(const Options& o, std::ostream& out) {
    Dataset data = load_dataset_file(o.data);
    std::optional<BayesianNetwork> ref;
    if (!o.ref.empty()) {
        ref = read_network_file(o.ref);
        data = align_dataset(data, ref->variables());
    }
    StatsCache stats(data);

    RunConfig cfg;
    static const std::map<std::string, MeasureKind> measures{
        {"disc", MeasureKind::Disc}, {"shield", MeasureKind::Shield}, {"score", MeasureKind::Score}};
    cfg.measure = measures.at(o.measure);
    cfg.k = o.k;
    cfg.score = score_config(o);
    cfg.maximizer = o.maximizer == "exact" ? Maximizer::ExactMrbn : Maximizer::GreedyConstrained;
    cfg.stopping = o.stop == "candidate" ? StopRule::Candidate : StopRule::Score;
    cfg.max_iterations = o.max_iters;
    cfg.disc.mc_samples = o.mc;
    cfg.disc.seed = o.seed;
    cfg.search.tabu_capacity = o.tabu;
    cfg.search.patience = o.patience;
    if (o.max_parents_set) cfg.search.max_in_degree = o.max_parents;
    cfg.reference = ref ? &*ref : nullptr;
    cfg.kl_samples = o.kl_samples;
    cfg.kl_seed = o.seed;

    const RunResult r = o.method == "greedy" ? run_greedy(data, cfg, stats) : run_sparse_candidate(data, cfg, stats);
    const std::string net_path = o.out.empty() ? "learned.net" : o.out;
    write_output(net_path, out, [&](std::ostream& s) { write_network(s, r.network); });
    write_output(o.report, out, [&](std::ostream& s) { write_report(s, r.reports); });
    if (net_path != "-" && o.report != "-") {
        out << "iterations " << r.reports.size() << "\tscore_per_instance " << shortest(r.reports.back().score_per_instance)
            << "\tarcs " << r.dag.num_edges() << "\tstop " << r.stop_reason << '\n';
    }
    return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& out) {
    const BayesianNetwork b = read_network_file(o.net);
    const Dataset d = forward_sample(b, o.n, o.seed);
    write_output(o.out.empty() ? "-" : o.out, out, [&](std::ostream& s) { write_dataset(s, d); });
    return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.data.empty() && o.ref.empty()) {
        err << "eval: give --data, --ref, or both\n";
        return kExitUsage;
    }
    const BayesianNetwork b = read_network_file(o.net);
    if (!o.data.empty()) {
        const Dataset data = align_dataset(load_dataset_file(o.data), b.variables());
        StatsCache stats(data);
        Scorer scorer(score_config(o), stats);
        const double rows = static_cast<double>(data.num_rows());
        out << "rows\t" << data.num_rows() << '\n';
        out << "score_per_instance\t" << shortest(scorer.network(b.dag()) / rows) << '\n';
        out << "loglik_per_instance\t" << shortest(log_likelihood(b, data) / rows) << '\n';
    }
    if (!o.ref.empty()) {
        const BayesianNetwork ref = read_network_file(o.ref);
        const KlEstimate kl = kl_to_reference(ref, b, o.kl_samples, o.seed);
        out << "kl\t" << shortest(kl.value) << '\n';
        out << "kl_mode\t" << (kl.exact ? "exact" : "monte_carlo") << '\n';
        if (!kl.exact) out << "kl_samples\t" << kl.samples << "\nkl_seed\t" << kl.seed << '\n';
    }
    return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
    SynthConfig cfg;
    cfg.num_vars = o.vars;
    cfg.max_parents = o.max_parents;
    cfg.seed = o.seed;
    const BayesianNetwork b = random_network(cfg);
    // A derived seed keeps the sample independent of the structure draws.
    const Dataset d = forward_sample(b, o.n, o.seed ^ 0x5bd1e995ULL);
    write_output(o.net.empty() ? "synth.net" : o.net, out, [&](std::ostream& s) { write_network(s, b); });
    write_output(o.out.empty() ? "synth.tsv" : o.out, out, [&](std::ostream& s) { write_dataset(s, d); });
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Bayesian network structure learning with sparse candidate sets", "sparsecand"};
    app.require_subcommand(1);

    auto* learn = app.add_subcommand("learn", "learn a network from data");
    learn->add_option("--data", o.data, "dataset file")->required();
    learn->add_option("--ref", o.ref, "generating network; adds KL to the report");
    learn->add_option("--out", o.out, "learned network file (default learned.net)");
    learn->add_option("--report", o.report, "iteration report file")->capture_default_str();
    learn->add_option("--method", o.method, "search method")->check(CLI::IsMember({"greedy", "sc"}))->capture_default_str();
    learn->add_option("--maximizer", o.maximizer, "maximize phase")
        ->check(CLI::IsMember({"greedy", "exact"}))
        ->capture_default_str();
    learn->add_option("--measure", o.measure, "restrict measure")
        ->check(CLI::IsMember({"disc", "shield", "score"}))
        ->capture_default_str();
    learn->add_option("--k", o.k, "candidate set size")->check(CLI::PositiveNumber)->capture_default_str();
    learn->add_option("--score", o.score, "score")->check(CLI::IsMember({"bde", "mdl"}))->capture_default_str();
    learn->add_option("--ess", o.ess, "BDe equivalent sample size")->check(CLI::PositiveNumber)->capture_default_str();
    learn->add_option("--tabu", o.tabu, "TABU list length")->check(CLI::NonNegativeNumber)->capture_default_str();
    learn->add_option("--patience", o.patience, "moves without improvement before stopping")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    learn->add_option("--stop", o.stop, "stopping rule")->check(CLI::IsMember({"score", "candidate"}))->capture_default_str();
    learn->add_option("--max-iters", o.max_iters, "iteration limit")->check(CLI::PositiveNumber)->capture_default_str();
    learn->add_option("--mc", o.mc, "samples for the discrepancy measure")->check(CLI::PositiveNumber)->capture_default_str();
    learn->add_option("--kl-samples", o.kl_samples, "samples for Monte-Carlo KL")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    learn->add_option("--seed", o.seed, "random seed")->capture_default_str();
    learn->add_option("--max-parents", o.max_parents, "in-degree bound (default none)")->check(CLI::NonNegativeNumber);

    auto* sample = app.add_subcommand("sample", "forward-sample a dataset from a network");
    sample->add_option("--net", o.net, "network file")->required();
    sample->add_option("--n", o.n, "number of instances")->required()->check(CLI::PositiveNumber);
    sample->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sample->add_option("--out", o.out, "dataset file (default standard output)");

    auto* eval = app.add_subcommand("eval", "score a network on data and/or compare it with a reference");
    eval->add_option("--net", o.net, "network file")->required();
    eval->add_option("--data", o.data, "dataset file");
    eval->add_option("--ref", o.ref, "reference network");
    eval->add_option("--score", o.score, "score")->check(CLI::IsMember({"bde", "mdl"}))->capture_default_str();
    eval->add_option("--ess", o.ess, "BDe equivalent sample size")->check(CLI::PositiveNumber)->capture_default_str();
    eval->add_option("--kl-samples", o.kl_samples, "samples for Monte-Carlo KL")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval->add_option("--seed", o.seed, "random seed")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "generate a random network and a sample from it");
    synth->add_option("--vars", o.vars, "number of variables")->check(CLI::PositiveNumber)->capture_default_str();
    synth->add_option("--max-parents", o.max_parents, "maximum in-degree")->check(CLI::NonNegativeNumber)->capture_default_str();
    synth->add_option("--n", o.n, "number of instances")->check(CLI::PositiveNumber)->capture_default_str();
    synth->add_option("--seed", o.seed, "random seed")->capture_default_str();
    synth->add_option("--net", o.net, "network file (default synth.net)");
    synth->add_option("--out", o.out, "dataset file (default synth.tsv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }
    o.max_parents_set = learn->count("--max-parents") > 0;

    try {
        if (*learn) return cmd_learn(o, out);
        if (*sample) return cmd_sample(o, out);
        if (*eval) return cmd_eval(o, out, err);
        return cmd_synth(o, out);
    } catch (const LimitError& e) {
        err << "limit exceeded: " << e.what() << '\n';
        return kExitLimit;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

} // namespace sparsecand
