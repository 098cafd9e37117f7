#include "rinmf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rinmf/grouping.hpp"
#include "rinmf/io.hpp"
#include "rinmf/metrics.hpp"

namespace rinmf {

namespace {

using nlohmann::json;

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

// population std so a single restart reports exactly 0
double std_of(const std::vector<double>& v) {
    const double mu = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

template <typename Fn>
auto with_context(const std::string& ctx, Fn&& fn) {
    try {
        return fn();
    } catch (const shape_error& e) {
        throw shape_error(ctx + ": " + e.what());
    } catch (const domain_error& e) {
        throw domain_error(ctx + ": " + e.what());
    } catch (const config_error& e) {
        throw config_error(ctx + ": " + e.what());
    } catch (const data_error& e) {
        throw data_error(ctx + ": " + e.what());
    } catch (const divergence_error& e) {
        throw divergence_error(ctx + ": " + e.what());
    }
}

struct CellResult {
    EvalReport eval;
    bool converged = false;
};

} // namespace

GroupingMethod parse_grouping(std::string_view name) {
    if (name == "kmeans") return GroupingMethod::kmeans;
    if (name == "supervised") return GroupingMethod::kmeans_supervised;
    if (name == "rfa") return GroupingMethod::rfa;
    if (name == "clusters") return GroupingMethod::explicit_clusters;
    throw config_error("unknown grouping '" + std::string(name) + "'");
}

std::string_view grouping_name(GroupingMethod g) {
    switch (g) {
    case GroupingMethod::kmeans: return "kmeans";
    case GroupingMethod::kmeans_supervised: return "supervised";
    case GroupingMethod::rfa: return "rfa";
    case GroupingMethod::explicit_clusters: return "clusters";
    }
    throw config_error("unknown grouping enum value");
}

RunManifest run_experiment(const ExperimentSpec& spec) {
    if (spec.restarts == 0) throw config_error("restarts must be at least 1");
    if (spec.variants.empty()) throw config_error("no variants requested");
    if (spec.out_dir.empty()) throw config_error("no output directory");

    std::vector<Variant> variants;
    for (const auto& name : spec.variants) variants.push_back(parse_variant(name));

    const Matrix x = load_dataset(spec.data_path);
    const std::size_t m = x.rows();

    std::optional<RuleSet> rules;
    if (!spec.rules_path.empty()) rules = load_rules(spec.rules_path, m);

    const bool any_cost = std::any_of(variants.begin(), variants.end(), variant_uses_cost);
    const bool any_rfa = std::any_of(variants.begin(), variants.end(), variant_uses_rfa);
    if (any_cost && !rules) {
        throw config_error("cost-regularized variants need --rules");
    }

    // resolved factor count
    std::size_t k = spec.k;
    if (spec.grouping == GroupingMethod::kmeans_supervised) {
        if (spec.per_class_k.empty()) {
            throw config_error("supervised grouping needs per-class factor counts");
        }
        k = 0;
        for (const auto& [label, kc] : spec.per_class_k) k += kc;
    }

    // primary grouping -> clusters every variant is evaluated against
    std::vector<std::vector<std::size_t>> primary_clusters;
    switch (spec.grouping) {
    case GroupingMethod::kmeans:
        if (!rules) throw config_error("kmeans grouping needs --rules");
        primary_clusters =
            kmeans_rules(*rules, k, spec.kmeans_max_iters, spec.seed_base).clusters;
        break;
    case GroupingMethod::kmeans_supervised:
        if (!rules) throw config_error("supervised grouping needs --rules");
        primary_clusters = kmeans_rules_supervised(*rules, spec.per_class_k,
                                                   spec.kmeans_max_iters,
                                                   spec.seed_base)
                               .clusters;
        break;
    case GroupingMethod::rfa: {
        if (!rules) throw config_error("rfa grouping needs --rules");
        const Matrix f_init = init_factors(m, x.cols(), k, spec.seed_base).first;
        const bool labeled = std::all_of(rules->rules().begin(), rules->rules().end(),
                                         [](const Rule& r) { return !r.label.empty(); });
        const std::size_t classes = labeled ? rules->labels().size() : 0;
        primary_clusters = rfa_assign(*rules, f_init, k, classes).clusters;
        break;
    }
    case GroupingMethod::explicit_clusters:
        if (spec.clusters_path.empty()) {
            throw config_error("clusters grouping needs --clusters");
        }
        primary_clusters = load_clusters(spec.clusters_path, m);
        k = primary_clusters.size();
        break;
    }

    // rfa variants (DF/DFE) use the rfa grouping even when the primary is
    // k-means; identical otherwise
    std::vector<std::vector<std::size_t>> rfa_clusters = primary_clusters;
    if (any_rfa && spec.grouping != GroupingMethod::rfa) {
        if (!rules) throw config_error("DF/DFE variants need --rules");
        const Matrix f_init = init_factors(m, x.cols(), k, spec.seed_base).first;
        const bool labeled = std::all_of(rules->rules().begin(), rules->rules().end(),
                                         [](const Rule& r) { return !r.label.empty(); });
        const std::size_t classes = labeled ? rules->labels().size() : 0;
        rfa_clusters = rfa_assign(*rules, f_init, k, classes).clusters;
    }

    const Matrix primary_ideal = build_ideal(primary_clusters, m);
    const Matrix rfa_ideal = build_ideal(rfa_clusters, m);
    Matrix p;
    if (rules) p = build_p(*rules);

    auto constraints_for = [&](Variant v) {
        const auto& clusters = variant_uses_rfa(v) ? rfa_clusters : primary_clusters;
        if (variant_uses_cost(v)) {
            return Constraints::with_cost(p, build_a(clusters, *rules));
        }
        if (variant_uses_ideal(v)) {
            return Constraints::with_ideal(build_ideal(clusters, m));
        }
        return Constraints::none();
    };

    std::optional<double> resolved_sparseness;
    if (std::find(variants.begin(), variants.end(), Variant::sp) != variants.end()) {
        resolved_sparseness = spec.target_sparseness
                                  ? *spec.target_sparseness
                                  : mean_row_sparseness(primary_ideal);
    }

    std::string reference = spec.reference_variant;
    if (std::find(spec.variants.begin(), spec.variants.end(), reference) ==
        spec.variants.end()) {
        reference = spec.variants.front();
    }
    const std::size_t ref_idx = static_cast<std::size_t>(
        std::find(spec.variants.begin(), spec.variants.end(), reference) -
        spec.variants.begin());

    RunManifest man;
    man.spec = spec;
    man.resolved_k = k;
    man.resolved_reference = reference;
    man.resolved_sparseness = resolved_sparseness;

    // results[variant][restart]
    std::vector<std::vector<CellResult>> results(
        variants.size(), std::vector<CellResult>(spec.restarts));
    for (std::size_t r = 0; r < spec.restarts; ++r) {
        man.seeds.push_back(spec.seed_base + r);
    }
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        const Variant v = variants[vi];
        const Constraints cons = constraints_for(v);
        const auto& eval_clusters = variant_uses_rfa(v) ? rfa_clusters : primary_clusters;
        const Matrix& eval_ideal = variant_uses_rfa(v) ? rfa_ideal : primary_ideal;
        for (std::size_t r = 0; r < spec.restarts; ++r) {
            SolverConfig cfg;
            cfg.variant = v;
            cfg.k = k;
            cfg.lambda_c = spec.c;
            cfg.lambda_override = spec.lambda_override;
            cfg.max_iters = spec.max_iters;
            cfg.tolerance = spec.tolerance;
            cfg.epsilon = spec.epsilon;
            cfg.normalize_f = spec.normalize_f;
            cfg.hals_literal = spec.hals_literal;
            cfg.gd_literal = spec.gd_literal;
            cfg.seed = man.seeds[r];
            cfg.step_size = spec.step_size;
            if (resolved_sparseness) cfg.target_sparseness = *resolved_sparseness;

            const std::string ctx = "variant " + spec.variants[vi] + " restart " +
                                    std::to_string(r);
            const auto t0 = std::chrono::steady_clock::now();
            const FactorModel fm = with_context(ctx, [&] {
                // shared-initialization contract: same (F0, G0) per restart
                auto [f0, g0] = init_factors(m, x.cols(), k, man.seeds[r]);
                return solve(x, cfg, cons, std::move(f0), std::move(g0));
            });
            const auto t1 = std::chrono::steady_clock::now();
            man.wall_seconds.push_back(
                std::chrono::duration<double>(t1 - t0).count());
            results[vi][r].eval =
                with_context(ctx, [&] {
                    return evaluate_model(x, fm.f, fm.g, fm.iterations_run,
                                          eval_ideal, eval_clusters,
                                          spec.hungarian_pairing);
                });
            results[vi][r].converged = fm.converged;
        }
    }

    // ADC against the reference variant, per restart
    std::vector<std::vector<double>> adc(variants.size(),
                                         std::vector<double>(spec.restarts, 0.0));
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        for (std::size_t r = 0; r < spec.restarts; ++r) {
            adc[vi][r] = avg_corr_difference(results[ref_idx][r].eval.corr,
                                             results[vi][r].eval.corr);
        }
    }

    std::filesystem::create_directories(spec.out_dir);

    {
        std::ofstream out(spec.out_dir / "report.csv", std::ios::binary);
        if (!out) throw data_error("cannot write report.csv");
        out << "dataset,algorithm,k,iters_mean,iters_std,re_mean,re_std,"
               "de_mean,de_std,corr_mean,corr_std,adc_mean,adc_std,converged_runs\n";
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            std::vector<double> re, de, corr, iters;
            std::size_t converged = 0;
            for (const auto& cell : results[vi]) {
                re.push_back(cell.eval.re);
                de.push_back(cell.eval.de);
                corr.push_back(cell.eval.mean_corr);
                iters.push_back(static_cast<double>(cell.eval.iterations));
                converged += cell.converged ? 1 : 0;
            }
            out << spec.dataset_name << ',' << spec.variants[vi] << ',' << k << ','
                << format_double(mean_of(iters)) << ',' << format_double(std_of(iters))
                << ',' << format_double(mean_of(re)) << ',' << format_double(std_of(re))
                << ',' << format_double(mean_of(de)) << ',' << format_double(std_of(de))
                << ',' << format_double(mean_of(corr)) << ','
                << format_double(std_of(corr)) << ',' << format_double(mean_of(adc[vi]))
                << ',' << format_double(std_of(adc[vi])) << ',' << converged << '\n';
        }
    }
    {
        std::ofstream out(spec.out_dir / "runs.csv", std::ios::binary);
        if (!out) throw data_error("cannot write runs.csv");
        out << "dataset,algorithm,restart,seed,iterations,converged,re,de,"
               "mean_corr,adc\n";
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            for (std::size_t r = 0; r < spec.restarts; ++r) {
                const auto& cell = results[vi][r];
                out << spec.dataset_name << ',' << spec.variants[vi] << ',' << r << ','
                    << man.seeds[r] << ',' << cell.eval.iterations << ','
                    << (cell.converged ? 1 : 0) << ',' << format_double(cell.eval.re)
                    << ',' << format_double(cell.eval.de) << ','
                    << format_double(cell.eval.mean_corr) << ','
                    << format_double(adc[vi][r]) << '\n';
            }
        }
    }
    {
        std::ofstream out(spec.out_dir / "factor_corr.csv", std::ios::binary);
        if (!out) throw data_error("cannot write factor_corr.csv");
        out << "algorithm,factor,corr_mean,corr_std\n";
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            for (std::size_t fi = 0; fi < k; ++fi) {
                std::vector<double> vals;
                for (const auto& cell : results[vi]) vals.push_back(cell.eval.corr[fi]);
                out << spec.variants[vi] << ',' << fi << ','
                    << format_double(mean_of(vals)) << ',' << format_double(std_of(vals))
                    << '\n';
            }
        }
    }

    for (const char* name : {"report.csv", "runs.csv", "factor_corr.csv"}) {
        man.artifact_hashes[name] = file_hash(spec.out_dir / name);
    }
    save_manifest(man, spec.out_dir / "manifest.json");
    return man;
}

namespace {

json spec_to_json(const ExperimentSpec& s) {
    json j;
    j["dataset_name"] = s.dataset_name;
    j["data_path"] = s.data_path.string();
    j["rules_path"] = s.rules_path.string();
    j["clusters_path"] = s.clusters_path.string();
    j["variants"] = s.variants;
    j["grouping"] = std::string(grouping_name(s.grouping));
    j["k"] = s.k;
    json pck = json::array();
    for (const auto& [label, kc] : s.per_class_k) {
        pck.push_back({{"label", label}, {"k", kc}});
    }
    j["per_class_k"] = pck;
    j["c"] = s.c;
    if (s.lambda_override) j["lambda"] = *s.lambda_override;
    j["max_iters"] = s.max_iters;
    j["tolerance"] = s.tolerance;
    j["epsilon"] = s.epsilon;
    j["restarts"] = s.restarts;
    j["seed"] = s.seed_base;
    j["normalize_f"] = s.normalize_f;
    j["hals_literal"] = s.hals_literal;
    j["gd_literal"] = s.gd_literal;
    if (s.target_sparseness) j["sparseness"] = *s.target_sparseness;
    if (s.step_size) j["step_size"] = *s.step_size;
    j["reference_variant"] = s.reference_variant;
    j["hungarian_pairing"] = s.hungarian_pairing;
    j["kmeans_max_iters"] = s.kmeans_max_iters;
    return j;
}

ExperimentSpec spec_from_json(const json& j) {
    ExperimentSpec s;
    s.dataset_name = j.at("dataset_name").get<std::string>();
    s.data_path = j.at("data_path").get<std::string>();
    s.rules_path = j.at("rules_path").get<std::string>();
    s.clusters_path = j.at("clusters_path").get<std::string>();
    s.variants = j.at("variants").get<std::vector<std::string>>();
    s.grouping = parse_grouping(j.at("grouping").get<std::string>());
    s.k = j.at("k").get<std::size_t>();
    for (const auto& e : j.at("per_class_k")) {
        s.per_class_k.emplace_back(e.at("label").get<std::string>(),
                                   e.at("k").get<std::size_t>());
    }
    s.c = j.at("c").get<double>();
    if (j.contains("lambda")) s.lambda_override = j["lambda"].get<double>();
    s.max_iters = j.at("max_iters").get<std::size_t>();
    s.tolerance = j.at("tolerance").get<double>();
    s.epsilon = j.at("epsilon").get<double>();
    s.restarts = j.at("restarts").get<std::size_t>();
    s.seed_base = j.at("seed").get<std::uint64_t>();
    s.normalize_f = j.at("normalize_f").get<bool>();
    s.hals_literal = j.at("hals_literal").get<bool>();
    s.gd_literal = j.at("gd_literal").get<bool>();
    if (j.contains("sparseness")) s.target_sparseness = j["sparseness"].get<double>();
    if (j.contains("step_size")) s.step_size = j["step_size"].get<double>();
    s.reference_variant = j.at("reference_variant").get<std::string>();
    s.hungarian_pairing = j.at("hungarian_pairing").get<bool>();
    s.kmeans_max_iters = j.at("kmeans_max_iters").get<std::size_t>();
    return s;
}

} // namespace

void save_manifest(const RunManifest& man, const std::filesystem::path& path) {
    json j;
    j["spec"] = spec_to_json(man.spec);
    j["resolved_k"] = man.resolved_k;
    j["resolved_reference"] = man.resolved_reference;
    if (man.resolved_sparseness) j["resolved_sparseness"] = *man.resolved_sparseness;
    j["seeds"] = man.seeds;
    j["wall_seconds"] = man.wall_seconds;
    j["artifact_hashes"] = man.artifact_hashes;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

ExperimentSpec spec_from_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw data_error(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        return spec_from_json(j.at("spec"));
    } catch (const json::exception& e) {
        throw data_error(path.string() + ": bad manifest: " + e.what());
    }
}

RunManifest run_from_manifest(const std::filesystem::path& manifest_path,
                              const std::filesystem::path& out_dir) {
    ExperimentSpec spec = spec_from_manifest(manifest_path);
    spec.out_dir = out_dir;
    return run_experiment(spec);
}

} // namespace rinmf
