#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rinmf/solvers.hpp"

namespace rinmf {

enum class GroupingMethod { kmeans, kmeans_supervised, rfa, explicit_clusters };

GroupingMethod parse_grouping(std::string_view name);
std::string_view grouping_name(GroupingMethod g);

// Everything a bench run needs; serialized into the manifest so a run can be
// replayed bit-for-bit.
struct ExperimentSpec {
    std::string dataset_name = "data";
    std::filesystem::path data_path;
    std::filesystem::path rules_path;    // empty = no rules
    std::filesystem::path clusters_path; // explicit_clusters grouping
    std::vector<std::string> variants;   // run order = report order
    GroupingMethod grouping = GroupingMethod::kmeans;
    std::size_t k = 2;
    std::vector<std::pair<std::string, std::size_t>> per_class_k; // supervised
    double c = 1.0;
    std::optional<double> lambda_override;
    std::size_t max_iters = 50000;
    double tolerance = 1e-8;
    double epsilon = 1e-9;
    std::size_t restarts = 10;
    std::uint64_t seed_base = 0;
    bool normalize_f = false;
    bool hals_literal = false;
    bool gd_literal = false;
    std::optional<double> target_sparseness; // SP; default = ideal row mean
    std::optional<double> step_size;
    std::string reference_variant = "D"; // ADC baseline; falls back to first
    bool hungarian_pairing = false;
    std::size_t kmeans_max_iters = 100;
    std::filesystem::path out_dir;
};

struct RunManifest {
    ExperimentSpec spec;                              // resolved echo
    std::size_t resolved_k = 0;
    std::string resolved_reference;
    std::optional<double> resolved_sparseness;
    std::vector<std::uint64_t> seeds;                 // one per restart
    std::vector<double> wall_seconds;                 // variant-major cells
    std::map<std::string, std::string> artifact_hashes;
};

// Runs variants x restarts with one shared (F0, G0) per restart, evaluates
// every run, and writes report.csv, runs.csv, factor_corr.csv and
// manifest.json into spec.out_dir.
RunManifest run_experiment(const ExperimentSpec& spec);

void save_manifest(const RunManifest& man, const std::filesystem::path& path);
ExperimentSpec spec_from_manifest(const std::filesystem::path& path);

// Replay: load the spec from a manifest, redirect output, rerun.
RunManifest run_from_manifest(const std::filesystem::path& manifest_path,
                              const std::filesystem::path& out_dir);

} // namespace rinmf
