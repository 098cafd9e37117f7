#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rinmf/errors.hpp"
#include "rinmf/experiment.hpp"
#include "rinmf/io.hpp"
#include "rinmf/synth.hpp"

using namespace rinmf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& leaf) {
    const fs::path p = fs::temp_directory_path() / "rinmf_exp_tests" / leaf;
    fs::create_directories(p);
    return p;
}

// writes a small synthetic dataset and returns (data.csv, rules.jsonl)
std::pair<fs::path, fs::path> make_dataset(const std::string& leaf, std::uint64_t seed) {
    const fs::path dir = scratch(leaf);
    const SyntheticData d = generate_synthetic(18, 12, 2, 0.05, 0.0, 3, seed);
    const fs::path data = dir / "data.csv";
    save_matrix_csv(data, d.x);
    const fs::path rules = dir / "rules.jsonl";
    std::ofstream out(rules);
    for (std::size_t j = 0; j < d.rules.size(); ++j) {
        const Rule& r = d.rules[j];
        out << "{\"id\": \"" << r.id << "\", \"support\": [";
        for (std::size_t i = 0; i < r.support.size(); ++i) {
            if (i) out << ",";
            out << r.support[i];
        }
        out << "], \"label\": \"" << r.label << "\"}\n";
    }
    return {data, rules};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> csv_lines(const fs::path& p) {
    std::vector<std::string> lines;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

ExperimentSpec base_spec(const fs::path& data, const fs::path& rules,
                         const fs::path& out) {
    ExperimentSpec spec;
    spec.dataset_name = "synthetic";
    spec.data_path = data;
    spec.rules_path = rules;
    spec.k = 2;
    spec.max_iters = 150;
    spec.restarts = 2;
    spec.seed_base = 5;
    spec.out_dir = out;
    return spec;
}

} // namespace

TEST_CASE("grouping names round-trip") {
    for (GroupingMethod g : {GroupingMethod::kmeans, GroupingMethod::kmeans_supervised,
                             GroupingMethod::rfa, GroupingMethod::explicit_clusters}) {
        CHECK(parse_grouping(grouping_name(g)) == g);
    }
    CHECK_THROWS_AS(parse_grouping("nope"), config_error);
}

TEST_CASE("single-variant run produces a one-row report with zero std") {
    const auto [data, rules] = make_dataset("single", 11);
    const fs::path out = scratch("single_out");
    ExperimentSpec spec = base_spec(data, rules, out);
    spec.variants = {"MU"};
    spec.restarts = 1;
    const RunManifest man = run_experiment(spec);

    const auto report = csv_lines(out / "report.csv");
    REQUIRE(report.size() == 2); // header + MU
    CHECK(report[0] ==
          "dataset,algorithm,k,iters_mean,iters_std,re_mean,re_std,de_mean,de_std,"
          "corr_mean,corr_std,adc_mean,adc_std,converged_runs");
    CHECK(report[1].find("synthetic,MU,2,") == 0);
    // std columns must be exactly 0 with a single restart
    std::stringstream ss(report[1]);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 14);
    CHECK(cells[4] == "0");  // iters_std
    CHECK(cells[6] == "0");  // re_std
    CHECK(cells[8] == "0");  // de_std
    CHECK(man.seeds.size() == 1);
    CHECK(man.resolved_k == 2);
}

TEST_CASE("ADC is computed against the reference variant per restart") {
    const auto [data, rules] = make_dataset("adc", 13);
    const fs::path out = scratch("adc_out");
    ExperimentSpec spec = base_spec(data, rules, out);
    spec.variants = {"D", "MU"};
    run_experiment(spec);

    // recompute ADC from the per-run correspondence data in runs.csv
    const auto runs = csv_lines(out / "runs.csv");
    REQUIRE(runs.size() == 1 + 2 * 2); // header + 2 variants x 2 restarts
    CHECK(runs[0] == "dataset,algorithm,restart,seed,iterations,converged,re,de,mean_corr,adc");
    // reference rows (D) must carry adc = 0
    for (const std::string& line : runs) {
        if (line.find(",D,") != std::string::npos) {
            CHECK(line.substr(line.rfind(',') + 1) == "0");
        }
    }
}

TEST_CASE("the reference falls back to the first variant when D is absent") {
    const auto [data, rules] = make_dataset("fallback", 17);
    const fs::path out = scratch("fallback_out");
    ExperimentSpec spec = base_spec(data, rules, out);
    spec.variants = {"MU", "DE"};
    spec.restarts = 1;
    const RunManifest man = run_experiment(spec);
    CHECK(man.resolved_reference == "MU");
}

TEST_CASE("manifest replay is byte-identical") {
    const auto [data, rules] = make_dataset("replay", 29);
    const fs::path out = scratch("replay_out");
    ExperimentSpec spec = base_spec(data, rules, out);
    spec.variants = {"D", "DE", "MU"};
    const RunManifest man = run_experiment(spec);
    (void)man;

    const fs::path out2 = scratch("replay_out2");
    run_from_manifest(out / "manifest.json", out2);
    for (const char* name : {"report.csv", "runs.csv", "factor_corr.csv"}) {
        CHECK(slurp(out / name) == slurp(out2 / name));
    }
}

TEST_CASE("explicit clusters grouping reads the cluster file") {
    const auto [data, rules] = make_dataset("explicit", 31);
    const fs::path dir = scratch("explicit");
    const fs::path clusters = dir / "clusters.txt";
    {
        std::ofstream out(clusters);
        // the generator puts the first ceil(18/2) entities in block 0
        out << "0 1 2 3 4 5 6 7 8\n9 10 11 12 13 14 15 16 17\n";
    }
    const fs::path out = scratch("explicit_out");
    ExperimentSpec spec = base_spec(data, rules, out);
    spec.variants = {"DE"};
    spec.grouping = GroupingMethod::explicit_clusters;
    spec.clusters_path = clusters;
    spec.restarts = 1;
    const RunManifest man = run_experiment(spec);
    CHECK(man.resolved_k == 2);
    CHECK(fs::exists(out / "report.csv"));
}

TEST_CASE("constrained variants without rules are rejected") {
    const auto [data, rules] = make_dataset("norules", 37);
    (void)rules;
    const fs::path out = scratch("norules_out");
    ExperimentSpec spec = base_spec(data, "", out);
    spec.variants = {"D"};
    CHECK_THROWS_AS(run_experiment(spec), config_error);
}

TEST_CASE("run errors carry the variant and restart context") {
    const auto [data, rules] = make_dataset("context", 41);
    const fs::path out = scratch("context_out");
    ExperimentSpec spec = base_spec(data, rules, out);
    spec.variants = {"GD"};
    spec.step_size = 1e300; // forces divergence
    spec.restarts = 1;
    try {
        run_experiment(spec);
        FAIL("expected divergence_error");
    } catch (const divergence_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("GD") != std::string::npos);
        CHECK(msg.find("restart") != std::string::npos);
    }
}

TEST_CASE("manifest spec round-trips") {
    const auto [data, rules] = make_dataset("spec_rt", 43);
    const fs::path out = scratch("spec_rt_out");
    ExperimentSpec spec = base_spec(data, rules, out);
    spec.variants = {"D", "SP"};
    spec.grouping = GroupingMethod::kmeans_supervised;
    spec.per_class_k = {{"c0", 1}, {"c1", 1}};
    spec.c = 0.75;
    spec.hungarian_pairing = true;
    run_experiment(spec);

    const ExperimentSpec loaded = spec_from_manifest(out / "manifest.json");
    CHECK(loaded.dataset_name == spec.dataset_name);
    CHECK(loaded.variants == spec.variants);
    CHECK(loaded.grouping == GroupingMethod::kmeans_supervised);
    CHECK(loaded.per_class_k == spec.per_class_k);
    CHECK(loaded.c == spec.c);
    CHECK(loaded.hungarian_pairing);
    CHECK(loaded.seed_base == spec.seed_base);
}
