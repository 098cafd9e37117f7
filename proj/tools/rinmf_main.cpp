#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rinmf/experiment.hpp"
#include "rinmf/grouping.hpp"
#include "rinmf/io.hpp"
#include "rinmf/metrics.hpp"
#include "rinmf/solvers.hpp"
#include "rinmf/synth.hpp"

namespace {

using namespace rinmf;

std::vector<std::pair<std::string, std::size_t>>
parse_per_class_k(const std::string& arg) {
    std::vector<std::pair<std::string, std::size_t>> out;
    std::size_t start = 0;
    while (start <= arg.size()) {
        const std::size_t comma = std::min(arg.find(',', start), arg.size());
        const std::string item = arg.substr(start, comma - start);
        if (!item.empty()) {
            const std::size_t eq = item.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
                throw config_error("bad --per-class-k entry '" + item +
                                   "', expected LABEL=COUNT");
            }
            try {
                out.emplace_back(item.substr(0, eq),
                                 static_cast<std::size_t>(std::stoull(item.substr(eq + 1))));
            } catch (const std::exception&) {
                throw config_error("bad count in --per-class-k entry '" + item + "'");
            }
        }
        start = comma + 1;
    }
    if (out.empty()) throw config_error("--per-class-k is empty");
    return out;
}

std::vector<std::string> split_names(const std::string& arg) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= arg.size()) {
        const std::size_t comma = std::min(arg.find(',', start), arg.size());
        if (comma > start) out.push_back(arg.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

// Grouping material shared by factorize and evaluate.
struct GroupingRequest {
    std::string method = "kmeans";
    std::size_t k = 2;
    std::string per_class_k;
    std::filesystem::path clusters_path;
    std::uint64_t seed = 0;
    std::size_t kmeans_max_iters = 100;
};

std::vector<std::vector<std::size_t>>
resolve_clusters(const GroupingRequest& req, const std::optional<RuleSet>& rules,
                 std::size_t m, std::size_t n, std::size_t& k_out) {
    const GroupingMethod method = parse_grouping(req.method);
    if (method == GroupingMethod::explicit_clusters) {
        if (req.clusters_path.empty()) {
            throw config_error("grouping 'clusters' needs --clusters");
        }
        auto clusters = load_clusters(req.clusters_path, m);
        k_out = clusters.size();
        return clusters;
    }
    if (!rules) throw config_error("grouping '" + req.method + "' needs --rules");
    switch (method) {
    case GroupingMethod::kmeans:
        k_out = req.k;
        return kmeans_rules(*rules, req.k, req.kmeans_max_iters, req.seed).clusters;
    case GroupingMethod::kmeans_supervised: {
        const auto pck = parse_per_class_k(req.per_class_k);
        auto g = kmeans_rules_supervised(*rules, pck, req.kmeans_max_iters, req.seed);
        k_out = g.k;
        return g.clusters;
    }
    case GroupingMethod::rfa: {
        const Matrix f_init = init_factors(m, n, req.k, req.seed).first;
        const bool labeled =
            std::all_of(rules->rules().begin(), rules->rules().end(),
                        [](const Rule& r) { return !r.label.empty(); });
        auto g = rfa_assign(*rules, f_init, req.k,
                            labeled ? rules->labels().size() : 0);
        k_out = req.k;
        return g.clusters;
    }
    default:
        throw config_error("unhandled grouping");
    }
}

void add_grouping_flags(CLI::App* cmd, GroupingRequest& req) {
    cmd->add_option("--grouping", req.method,
                    "rule grouping: kmeans|supervised|rfa|clusters")
        ->default_val("kmeans");
    cmd->add_option("--k", req.k, "factor count");
    cmd->add_option("--per-class-k", req.per_class_k,
                    "per-class factor counts LABEL=INT[,LABEL=INT...]");
    cmd->add_option("--clusters", req.clusters_path, "explicit clusters file");
    cmd->add_option("--kmeans-iters", req.kmeans_max_iters,
                    "k-means iteration cap")
        ->default_val(100);
}

int run_factorize(const std::filesystem::path& data_path,
                  const std::filesystem::path& rules_path,
                  const GroupingRequest& grq, SolverConfig cfg, double c,
                  std::optional<double> lambda, std::optional<double> step,
                  std::optional<double> sparseness,
                  const std::filesystem::path& out_dir) {
    const Matrix x = load_dataset(data_path);
    std::optional<RuleSet> rules;
    if (!rules_path.empty()) rules = load_rules(rules_path, x.rows());

    cfg.lambda_c = c;
    cfg.lambda_override = lambda;
    cfg.step_size = step;

    Constraints cons = Constraints::none();
    std::optional<Matrix> ideal;
    std::vector<std::vector<std::size_t>> clusters;
    const bool needs_grouping = variant_uses_cost(cfg.variant) ||
                                variant_uses_ideal(cfg.variant) ||
                                (!rules_path.empty() || !grq.clusters_path.empty());
    if (needs_grouping) {
        GroupingRequest req = grq;
        req.seed = cfg.seed;
        std::size_t k_resolved = 0;
        clusters = resolve_clusters(req, rules, x.rows(), x.cols(), k_resolved);
        cfg.k = k_resolved;
        ideal = build_ideal(clusters, x.rows());
        if (variant_uses_cost(cfg.variant)) {
            if (!rules) throw config_error("variant needs --rules");
            cons = Constraints::with_cost(build_p(*rules), build_a(clusters, *rules));
        } else if (variant_uses_ideal(cfg.variant)) {
            cons = Constraints::with_ideal(*ideal);
        }
    } else {
        cfg.k = grq.k;
    }
    if (cfg.variant == Variant::sp) {
        if (sparseness) {
            cfg.target_sparseness = *sparseness;
        } else if (ideal) {
            cfg.target_sparseness = mean_row_sparseness(*ideal);
        } else {
            throw config_error("variant SP needs --sparseness or rule grouping");
        }
    }
    if (cfg.k > std::min(x.rows(), x.cols())) {
        std::cerr << "warning: k=" << cfg.k << " exceeds min(m,n)="
                  << std::min(x.rows(), x.cols()) << "\n";
    }

    const FactorModel fm = solve(x, cfg, cons);

    std::filesystem::create_directories(out_dir);
    save_matrix_csv(out_dir / "F.csv", fm.f);
    save_matrix_csv(out_dir / "G.csv", fm.g);
    {
        std::ofstream trace(out_dir / "objective_trace.csv", std::ios::binary);
        trace << "iteration,objective\n";
        for (std::size_t i = 0; i < fm.objective_trace.size(); ++i) {
            trace << i << ',' << format_double(fm.objective_trace[i]) << '\n';
        }
    }
    std::cout << "variant=" << variant_name(cfg.variant) << " k=" << cfg.k
              << " lambda=" << format_double(fm.lambda)
              << " iterations=" << fm.iterations_run
              << " converged=" << (fm.converged ? 1 : 0)
              << " objective=" << format_double(fm.objective_trace.back())
              << " re=" << format_double(representation_error(x, fm.f, fm.g));
    if (ideal) {
        const auto ca = cluster_assignment(fm.f);
        std::cout << " de=" << format_double(description_error(ca.binary, *ideal));
    }
    std::cout << "\n";
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"rule-regularized non-negative matrix factorization"};
    app.require_subcommand(1);

    // ---- factorize ----
    auto* fact = app.add_subcommand("factorize", "run one variant on one dataset");
    std::filesystem::path f_data, f_rules, f_out = ".";
    GroupingRequest f_grq;
    std::string f_variant = "MU";
    double f_c = 1.0;
    std::optional<double> f_lambda, f_step, f_sparseness;
    SolverConfig f_cfg;
    fact->add_option("--data", f_data, "data CSV")->required();
    fact->add_option("--rules", f_rules, "rules JSONL");
    fact->add_option("--variant", f_variant, "algorithm variant")->default_val("MU");
    add_grouping_flags(fact, f_grq);
    fact->add_option("--c", f_c, "lambda scale c")->default_val(1.0);
    fact->add_option("--lambda", f_lambda, "explicit lambda (bypasses --c)");
    fact->add_option("--max-iters", f_cfg.max_iters)->default_val(50000);
    fact->add_option("--tol", f_cfg.tolerance)->default_val(1e-8);
    fact->add_option("--eps", f_cfg.epsilon)->default_val(1e-9);
    fact->add_option("--seed", f_cfg.seed)->default_val(0);
    fact->add_flag("--normalize-f", f_cfg.normalize_f, "normalize F columns per iteration");
    fact->add_flag("--hals-literal", f_cfg.hals_literal, "unscaled HALS rule");
    fact->add_flag("--gd-literal", f_cfg.gd_literal, "printed GD rule without the data term");
    fact->add_option("--step-size", f_step, "fixed GD/OBD/SP step size");
    fact->add_option("--sparseness", f_sparseness, "SP sparseness target");
    fact->add_option("--out", f_out, "output directory")->default_val(".");

    // ---- evaluate ----
    auto* ev = app.add_subcommand("evaluate", "evaluate stored factors");
    std::filesystem::path e_data, e_rules, e_f, e_g;
    GroupingRequest e_grq;
    bool e_match = false;
    ev->add_option("--data", e_data, "data CSV")->required();
    ev->add_option("--rules", e_rules, "rules JSONL");
    ev->add_option("--f", e_f, "factor matrix F CSV")->required();
    ev->add_option("--g", e_g, "factor matrix G CSV")->required();
    add_grouping_flags(ev, e_grq);
    ev->add_option("--seed", e_grq.seed, "grouping seed")->default_val(0);
    ev->add_flag("--match-factors", e_match, "Hungarian factor pairing");

    // ---- cluster-rules ----
    auto* cr = app.add_subcommand("cluster-rules", "group rules into factors");
    std::filesystem::path c_rules, c_data, c_out;
    GroupingRequest c_grq;
    std::size_t c_m = 0;
    cr->add_option("--rules", c_rules, "rules JSONL")->required();
    cr->add_option("--data", c_data, "data CSV (for m)");
    cr->add_option("--m", c_m, "entity count (alternative to --data)");
    add_grouping_flags(cr, c_grq);
    cr->add_option("--seed", c_grq.seed, "grouping seed")->default_val(0);
    cr->add_option("--out", c_out, "directory for clusters.txt / grouping.csv");

    // ---- synth ----
    auto* sy = app.add_subcommand("synth", "generate planted-structure data");
    std::size_t s_m = 60, s_n = 40, s_k = 3, s_rpf = 3;
    double s_noise = 0.0, s_overlap = 0.0;
    std::uint64_t s_seed = 0;
    std::filesystem::path s_out;
    sy->add_option("--m", s_m, "entities")->default_val(60);
    sy->add_option("--n", s_n, "attributes")->default_val(40);
    sy->add_option("--k", s_k, "blocks / factors")->default_val(3);
    sy->add_option("--noise", s_noise, "uniform noise amplitude")->default_val(0.0);
    sy->add_option("--overlap", s_overlap, "rule overlap in [0,1]")->default_val(0.0);
    sy->add_option("--rules-per-factor", s_rpf)->default_val(3);
    sy->add_option("--seed", s_seed)->default_val(0);
    sy->add_option("--out", s_out, "output directory")->required();

    // ---- bench ----
    auto* be = app.add_subcommand("bench", "variants x restarts protocol run");
    ExperimentSpec spec;
    std::string b_variants = "D,DE,MU";
    std::string b_grouping = "kmeans";
    std::string b_per_class_k;
    std::optional<double> b_lambda, b_sparseness, b_step;
    std::filesystem::path b_replay;
    be->add_option("--replay", b_replay, "manifest.json to replay (ignores other flags)");
    be->add_option("--data", spec.data_path, "data CSV");
    be->add_option("--rules", spec.rules_path, "rules JSONL");
    be->add_option("--clusters", spec.clusters_path, "explicit clusters file");
    be->add_option("--name", spec.dataset_name, "dataset name for reports")
        ->default_val("data");
    be->add_option("--variant", b_variants, "comma-separated variant list")
        ->default_val("D,DE,MU");
    be->add_option("--grouping", b_grouping, "kmeans|supervised|rfa|clusters")
        ->default_val("kmeans");
    be->add_option("--k", spec.k, "factor count")->default_val(2);
    be->add_option("--per-class-k", b_per_class_k, "LABEL=INT[,LABEL=INT...]");
    be->add_option("--c", spec.c, "lambda scale c")->default_val(1.0);
    be->add_option("--lambda", b_lambda, "explicit lambda (bypasses --c)");
    be->add_option("--max-iters", spec.max_iters)->default_val(50000);
    be->add_option("--tol", spec.tolerance)->default_val(1e-8);
    be->add_option("--eps", spec.epsilon)->default_val(1e-9);
    be->add_option("--restarts", spec.restarts)->default_val(10);
    be->add_option("--seed", spec.seed_base)->default_val(0);
    be->add_flag("--normalize-f", spec.normalize_f);
    be->add_flag("--hals-literal", spec.hals_literal);
    be->add_flag("--gd-literal", spec.gd_literal);
    be->add_option("--sparseness", b_sparseness, "SP sparseness target");
    be->add_option("--step-size", b_step, "fixed GD/OBD/SP step size");
    be->add_option("--reference", spec.reference_variant, "ADC reference variant")
        ->default_val("D");
    be->add_flag("--match-factors", spec.hungarian_pairing);
    be->add_option("--kmeans-iters", spec.kmeans_max_iters)->default_val(100);
    be->add_option("--out", spec.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // flag/usage problems are configuration errors; --help stays 0
        return code == 0 ? 0 : 2;
    }

    if (fact->parsed()) {
        f_cfg.variant = parse_variant(f_variant);
        return run_factorize(f_data, f_rules, f_grq, f_cfg, f_c, f_lambda, f_step,
                             f_sparseness, f_out);
    }

    if (ev->parsed()) {
        const Matrix x = load_dataset(e_data);
        const Matrix f = load_matrix_csv(e_f);
        const Matrix g = load_matrix_csv(e_g);
        std::optional<RuleSet> rules;
        if (!e_rules.empty()) rules = load_rules(e_rules, x.rows());
        std::size_t k_resolved = 0;
        auto clusters = resolve_clusters(e_grq, rules, x.rows(), x.cols(), k_resolved);
        if (k_resolved != f.cols()) {
            throw config_error("grouping yields k=" + std::to_string(k_resolved) +
                               " but F has k=" + std::to_string(f.cols()));
        }
        const Matrix ideal = build_ideal(clusters, x.rows());
        const EvalReport rep = evaluate_model(x, f, g, 0, ideal, clusters, e_match);
        double sparseness = 1.0;
        if (!rep.sparseness_rows.empty()) {
            sparseness = 0.0;
            for (double s : rep.sparseness_rows) sparseness += s;
            sparseness /= static_cast<double>(rep.sparseness_rows.size());
        }
        std::cout << "re,de,mean_corr,mean_row_sparseness\n"
                  << format_double(rep.re) << ',' << format_double(rep.de) << ','
                  << format_double(rep.mean_corr) << ','
                  << format_double(sparseness) << "\n";
        std::cout << "factor,corr\n";
        for (std::size_t i = 0; i < rep.corr.size(); ++i) {
            std::cout << i << ',' << format_double(rep.corr[i]) << "\n";
        }
        return 0;
    }

    if (cr->parsed()) {
        if ((c_data.empty() && c_m == 0) || (!c_data.empty() && c_m != 0)) {
            throw config_error("cluster-rules needs exactly one of --data or --m");
        }
        std::size_t m = c_m;
        std::size_t n = 1;
        if (!c_data.empty()) {
            const Matrix x = load_dataset(c_data);
            m = x.rows();
            n = x.cols();
        }
        auto rules = load_rules(c_rules, m);
        std::optional<RuleSet> rules_opt(rules);
        std::size_t k_resolved = 0;
        auto clusters = resolve_clusters(c_grq, rules_opt, m, n, k_resolved);
        std::cout << "cluster,size,entities\n";
        for (std::size_t z = 0; z < clusters.size(); ++z) {
            std::cout << z << ',' << clusters[z].size() << ',';
            for (std::size_t i = 0; i < clusters[z].size(); ++i) {
                if (i) std::cout << ' ';
                std::cout << clusters[z][i];
            }
            std::cout << "\n";
        }
        if (!c_out.empty()) {
            std::filesystem::create_directories(c_out);
            save_clusters(c_out / "clusters.txt", clusters);
        }
        return 0;
    }

    if (sy->parsed()) {
        const SyntheticData data =
            generate_synthetic(s_m, s_n, s_k, s_noise, s_overlap, s_rpf, s_seed);
        std::filesystem::create_directories(s_out);
        save_matrix_csv(s_out / "data.csv", data.x);
        {
            std::ofstream out(s_out / "rules.jsonl", std::ios::binary);
            for (const Rule& r : data.rules.rules()) {
                nlohmann::json j;
                j["id"] = r.id;
                j["label"] = r.label;
                j["support"] = r.support;
                out << j.dump() << '\n';
            }
        }
        save_clusters(s_out / "clusters.txt", data.truth.clusters);
        std::cout << "m=" << s_m << " n=" << s_n << " k=" << s_k
                  << " rules=" << data.rules.size()
                  << " coverage=" << format_double(coverage(data.rules)) << "\n";
        return 0;
    }

    if (be->parsed()) {
        if (!b_replay.empty()) {
            run_from_manifest(b_replay, spec.out_dir);
            std::cout << "replayed " << b_replay.string() << " into "
                      << spec.out_dir.string() << "\n";
            return 0;
        }
        if (spec.data_path.empty()) throw config_error("bench needs --data");
        spec.variants = split_names(b_variants);
        spec.grouping = parse_grouping(b_grouping);
        if (!b_per_class_k.empty()) {
            spec.per_class_k = parse_per_class_k(b_per_class_k);
            spec.grouping = GroupingMethod::kmeans_supervised;
        }
        spec.lambda_override = b_lambda;
        spec.target_sparseness = b_sparseness;
        spec.step_size = b_step;
        const RunManifest man = run_experiment(spec);
        std::cout << "wrote report.csv, runs.csv, factor_corr.csv, manifest.json to "
                  << spec.out_dir.string() << " (k=" << man.resolved_k
                  << ", reference=" << man.resolved_reference << ")\n";
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const divergence_error& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 4;
    } catch (const rinmf::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
