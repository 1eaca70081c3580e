#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rolesim/analysis.hpp"
#include "rolesim/benchgen.hpp"
#include "rolesim/errors.hpp"
#include "rolesim/graph.hpp"
#include "rolesim/lowrank.hpp"
#include "rolesim/matrix_io.hpp"
#include "rolesim/roles.hpp"
#include "rolesim/similarity.hpp"

namespace {

using namespace rolesim;

// Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 numerical failure.
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

RoleModel parse_model(const std::string& spec, const std::vector<int>& sizes) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("model must be community:K, cycle:K, or file:PATH");
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    DirectedGraph role_graph;
    if (kind == "community" || kind == "cycle") {
        int k = 0;
        try {
            k = std::stoi(arg);
        } catch (const std::exception&) {
            throw std::invalid_argument("model needs an integer role count: " + spec);
        }
        role_graph = preset_role_graph(
            kind == "community" ? RolePreset::community : RolePreset::cycle, k);
    } else if (kind == "file") {
        role_graph = load_edge_list(arg);
    } else {
        throw std::invalid_argument("unknown model kind: " + kind);
    }
    return RoleModel(std::move(role_graph), sizes);
}

double resolve_beta(const std::string& beta_str, const DirectedGraph& g) {
    if (beta_str == "auto") {
        const double b = default_beta(g);
        std::cerr << "beta auto-selected: " << b << " (90% of the admissible bound)\n";
        return b;
    }
    try {
        return std::stod(beta_str);
    } catch (const std::exception&) {
        throw std::invalid_argument("--beta must be a number or \"auto\"");
    }
}

int default_jobs() {
    if (const char* env = std::getenv("ROLESIM_JOBS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring malformed ROLESIM_JOBS\n";
        }
    }
    return 1;
}

struct GenerateArgs {
    std::string model;
    std::vector<int> sizes;
    double p_in = 0.0;
    double p_out = 0.0;
    std::uint64_t seed = 0;
    std::string out_prefix;
};

int cmd_generate(const GenerateArgs& a) {
    RoleModel model = parse_model(a.model, a.sizes);
    GeneratedInstance inst = generate(model, a.p_in, a.p_out, a.seed);
    save_edge_list(inst.graph, a.out_prefix + ".edges.tsv");
    save_partition(inst.truth, a.out_prefix + ".truth.tsv");
    std::cout << inst.graph.num_edges() << "\n";
    return 0;
}

struct SimilarityArgs {
    std::string graph;
    bool full = false;
    int rank = 0;
    std::string beta = "auto";
    double tol = 1e-9;
    int max_iter = 10000;
    bool force = false;
    bool materialize_out = false;
    std::string out;
};

int cmd_similarity(const SimilarityArgs& a) {
    DirectedGraph g = load_edge_list(a.graph);
    const double beta = resolve_beta(a.beta, g);
    ConvergenceReport report;
    if (a.full) {
        SimilarityResult res = full_similarity(g, beta, a.tol, a.max_iter, a.force);
        report = res.report;
        save_matrix_csv(res.matrix, a.out);
    } else {
        LowRankResult res = lowrank_similarity(g, a.rank, beta, a.tol, a.max_iter, a.force);
        report = res.report;
        if (a.materialize_out) {
            if (g.num_nodes() > 5000)
                throw std::invalid_argument("--materialize is limited to n <= 5000");
            save_matrix_csv(materialize(res.factor), a.out);
        } else {
            save_factor_csv(res.factor, a.out);
        }
    }
    save_convergence_csv(report, a.out + ".conv.csv");
    if (!report.converged) {
        std::cerr << "warning: no fixed point within " << report.iterations
                  << " iterations; outputs hold the last iterate\n";
        return kExitNumeric;
    }
    std::cerr << "converged in " << report.iterations << " iterations\n";
    return 0;
}

struct RolesArgs {
    std::string graph;
    int rank = 10;
    std::string beta = "auto";
    double resolution = 1.0;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    int max_iter = 10000;
    std::string out_prefix;
};

int cmd_roles(const RolesArgs& a) {
    DirectedGraph g = load_edge_list(a.graph);
    RoleExtractOptions opts;
    opts.rank = a.rank;
    opts.beta = resolve_beta(a.beta, g);
    opts.resolution = a.resolution;
    opts.seed = a.seed;
    opts.tol = a.tol;
    opts.max_iter = a.max_iter;
    Hierarchy h = extract_roles(g, opts);
    save_hierarchy(h, a.out_prefix);
    std::cerr << h.levels.size() << " levels, " << h.top().num_clusters()
              << " top-level clusters\n";
    return 0;
}

struct RankSweepArgs {
    std::string graph;
    int r_max = 0;
    std::string beta = "auto";
    double tol = 1e-9;
    int max_iter = 10000;
    std::string out;
};

int cmd_ranksweep(const RankSweepArgs& a) {
    DirectedGraph g = load_edge_list(a.graph);
    std::optional<double> beta;
    if (a.beta != "auto") beta = resolve_beta(a.beta, g);
    RankSweepReport rep = rank_sweep(g, a.r_max, beta, a.tol, a.max_iter);
    save_rank_sweep_csv(rep, a.out);
    if (rep.knee)
        std::cout << *rep.knee << "\n";
    else
        std::cout << "none\n";
    return 0;
}

struct EvaluateArgs {
    std::string a;
    std::string b;
};

int cmd_evaluate(const EvaluateArgs& args) {
    Partition pa = load_partition(args.a);
    Partition pb = load_partition(args.b);
    std::printf("%.6f\n", nmi(pa, pb));
    return 0;
}

struct ExperimentArgs {
    std::string model;
    std::vector<int> sizes;
    GridOptions grid;
    std::string out;
};

int cmd_experiment(const ExperimentArgs& a) {
    RoleModel model = parse_model(a.model, a.sizes);
    NmiGrid grid = nmi_grid(model, a.grid);
    save_nmi_grid_csv(grid, a.out);
    std::cerr << grid.cells.size() << " cells done\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Role similarity toolkit for directed graphs"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* sub_gen = app.add_subcommand("generate", "Draw a block-structured random graph");
    sub_gen->add_option("--model", gen.model, "community:K, cycle:K, or file:PATH")->required();
    sub_gen->add_option("--sizes", gen.sizes, "comma-separated block sizes")
        ->required()
        ->delimiter(',');
    sub_gen->add_option("--p-in", gen.p_in, "in-pattern edge probability")->required();
    sub_gen->add_option("--p-out", gen.p_out, "out-of-pattern edge probability")->required();
    sub_gen->add_option("--seed", gen.seed, "generator seed (default 0)");
    sub_gen->add_option("--out-prefix", gen.out_prefix, "writes <prefix>.edges.tsv and <prefix>.truth.tsv")
        ->required();

    SimilarityArgs sim;
    CLI::App* sub_sim = app.add_subcommand("similarity", "Compute the similarity fixed point");
    sub_sim->add_option("--graph", sim.graph, "edge list TSV")->required();
    CLI::Option* opt_full = sub_sim->add_flag("--full", sim.full, "dense computation");
    CLI::Option* opt_rank = sub_sim->add_option("--rank", sim.rank, "rank-bounded computation");
    opt_full->excludes(opt_rank);
    sub_sim->add_option("--beta", sim.beta, "scaling parameter or \"auto\" (default auto)");
    sub_sim->add_option("--tol", sim.tol, "relative convergence tolerance (default 1e-9)");
    sub_sim->add_option("--max-iter", sim.max_iter, "iteration cap (default 10000)");
    sub_sim->add_flag("--force", sim.force, "accept beta beyond the admissible bound");
    sub_sim->add_flag("--materialize", sim.materialize_out,
                      "with --rank: write the dense product instead of the factor (n <= 5000)");
    sub_sim->add_option("--out", sim.out,
                        "output CSV; the convergence trace lands at <out>.conv.csv")
        ->required();

    RolesArgs roles;
    CLI::App* sub_roles = app.add_subcommand("roles", "Extract a role hierarchy");
    sub_roles->add_option("--graph", roles.graph, "edge list TSV")->required();
    sub_roles->add_option("--rank", roles.rank, "similarity rank (default 10)");
    sub_roles->add_option("--beta", roles.beta, "scaling parameter or \"auto\"");
    sub_roles->add_option("--resolution", roles.resolution, "modularity resolution (default 1)");
    sub_roles->add_option("--seed", roles.seed, "tie-break seed (default 0)");
    sub_roles->add_option("--tol", roles.tol, "convergence tolerance (default 1e-9)");
    sub_roles->add_option("--max-iter", roles.max_iter, "iteration cap (default 10000)");
    sub_roles->add_option("--out-prefix", roles.out_prefix,
                          "writes <prefix>.level<i>.tsv and <prefix>.index.tsv")
        ->required();

    RankSweepArgs sweep;
    CLI::App* sub_sweep = app.add_subcommand("ranksweep", "Profile approximation error over rank");
    sub_sweep->add_option("--graph", sweep.graph, "edge list TSV")->required();
    sub_sweep->add_option("--rmax", sweep.r_max, "largest rank to profile")->required();
    sub_sweep->add_option("--beta", sweep.beta, "scaling parameter or \"auto\"");
    sub_sweep->add_option("--tol", sweep.tol, "convergence tolerance (default 1e-9)");
    sub_sweep->add_option("--max-iter", sweep.max_iter, "iteration cap (default 10000)");
    sub_sweep->add_option("--out", sweep.out, "report CSV")->required();

    EvaluateArgs eval;
    CLI::App* sub_eval = app.add_subcommand("evaluate", "NMI between two partition files");
    sub_eval->add_option("--a", eval.a, "partition TSV")->required();
    sub_eval->add_option("--b", eval.b, "partition TSV")->required();

    ExperimentArgs exp;
    exp.grid.jobs = default_jobs();
    CLI::App* sub_exp = app.add_subcommand("experiment", "Recovery sweep over (p_in, p_out)");
    sub_exp->add_option("--model", exp.model, "community:K, cycle:K, or file:PATH")->required();
    sub_exp->add_option("--sizes", exp.sizes, "comma-separated block sizes")
        ->required()
        ->delimiter(',');
    sub_exp->add_option("--step", exp.grid.step, "grid step, must divide 1 (default 0.05)");
    sub_exp->add_option("--realizations", exp.grid.realizations,
                        "instances per cell (default 20)");
    sub_exp->add_option("--rank", exp.grid.rank, "similarity rank (default 10)");
    sub_exp->add_option("--seed", exp.grid.seed_base, "base seed (default 0)");
    sub_exp->add_option("--resolution", exp.grid.resolution, "modularity resolution (default 1)");
    sub_exp->add_option("--jobs", exp.grid.jobs,
                        "worker threads (default ROLESIM_JOBS or 1); output is identical for any value");
    sub_exp->add_option("--out", exp.out, "grid CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (sub_gen->parsed()) return cmd_generate(gen);
        if (sub_sim->parsed()) {
            if (!sim.full && sim.rank == 0)
                throw std::invalid_argument("pass exactly one of --full or --rank");
            return cmd_similarity(sim);
        }
        if (sub_roles->parsed()) return cmd_roles(roles);
        if (sub_sweep->parsed()) return cmd_ranksweep(sweep);
        if (sub_eval->parsed()) return cmd_evaluate(eval);
        if (sub_exp->parsed()) return cmd_experiment(exp);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
