#include "rinmf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rinmf {

namespace {

std::string loc(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

bool blank(const std::string& s) {
    for (char c : s) {
        if (c != ' ' && c != '\t') return false;
    }
    return true;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path,
                  std::size_t line, std::size_t col) {
    std::size_t b = 0, e = cell.size();
    while (b < e && (cell[b] == ' ' || cell[b] == '\t')) ++b;
    while (e > b && (cell[e - 1] == ' ' || cell[e - 1] == '\t')) --e;
    double v = 0.0;
    const auto res = std::from_chars(cell.data() + b, cell.data() + e, v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + e || b == e) {
        throw data_error(loc(path, line) + ": column " + std::to_string(col) +
                         ": not a number: '" + cell + "'");
    }
    return v;
}

Matrix load_csv(const std::filesystem::path& path, bool require_nonnegative) {
    const auto lines = read_lines(path);
    std::vector<double> values;
    std::size_t cols = 0, rows = 0;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (blank(lines[li])) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(lines[li]);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (lines[li].back() == ',') cells.push_back("");
        ++rows;
        if (cols == 0) {
            cols = cells.size();
        } else if (cells.size() != cols) {
            throw data_error(loc(path, li + 1) + ": ragged row, " +
                             std::to_string(cells.size()) + " cells instead of " +
                             std::to_string(cols));
        }
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
            const double v = parse_cell(cells[ci], path, li + 1, ci + 1);
            if (!std::isfinite(v)) {
                throw data_error(loc(path, li + 1) + ": column " +
                                 std::to_string(ci + 1) + ": non-finite value");
            }
            if (require_nonnegative && v < 0.0) {
                throw data_error(loc(path, li + 1) + ": column " +
                                 std::to_string(ci + 1) + ": negative value " +
                                 cells[ci]);
            }
            values.push_back(v);
        }
    }
    if (rows == 0) throw data_error(path.string() + ": empty file");
    return Matrix(rows, cols, std::move(values));
}

} // namespace

Matrix load_dataset(const std::filesystem::path& path) {
    return load_csv(path, true);
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
    return load_csv(path, false);
}

RuleSet load_rules(const std::filesystem::path& path, std::size_t m) {
    const auto lines = read_lines(path);
    std::vector<Rule> rules;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (blank(lines[li])) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(lines[li]);
        } catch (const nlohmann::json::exception& e) {
            throw data_error(loc(path, li + 1) + ": invalid JSON: " + e.what());
        }
        if (!j.is_object()) {
            throw data_error(loc(path, li + 1) + ": rule must be a JSON object");
        }
        Rule r;
        if (!j.contains("id") || !j["id"].is_string()) {
            throw data_error(loc(path, li + 1) + ": missing string field 'id'");
        }
        r.id = j["id"].get<std::string>();
        if (!j.contains("support") || !j["support"].is_array()) {
            throw data_error(loc(path, li + 1) + ": missing array field 'support'");
        }
        for (const auto& e : j["support"]) {
            if (!e.is_number_integer() || e.get<long long>() < 0) {
                throw data_error(loc(path, li + 1) +
                                 ": support entries must be non-negative integers");
            }
            const auto idx = e.get<unsigned long long>();
            if (idx >= m) {
                throw data_error(loc(path, li + 1) + ": entity index " +
                                 std::to_string(idx) + " out of range for m=" +
                                 std::to_string(m));
            }
            r.support.push_back(static_cast<std::size_t>(idx));
        }
        if (j.contains("label")) {
            if (!j["label"].is_string()) {
                throw data_error(loc(path, li + 1) + ": 'label' must be a string");
            }
            r.label = j["label"].get<std::string>();
        }
        if (j.contains("quality")) {
            if (!j["quality"].is_number()) {
                throw data_error(loc(path, li + 1) + ": 'quality' must be a number");
            }
            r.quality = j["quality"].get<double>();
        }
        rules.push_back(std::move(r));
    }
    return RuleSet(m, std::move(rules));
}

std::vector<std::vector<std::size_t>>
load_clusters(const std::filesystem::path& path, std::size_t m) {
    const auto lines = read_lines(path);
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (blank(lines[li])) continue;
        std::vector<std::size_t> cluster;
        std::stringstream ss(lines[li]);
        std::string tok;
        while (ss >> tok) {
            unsigned long long idx = 0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
                throw data_error(loc(path, li + 1) + ": not an entity index: '" +
                                 tok + "'");
            }
            if (idx >= m) {
                throw data_error(loc(path, li + 1) + ": entity index " +
                                 std::to_string(idx) + " out of range for m=" +
                                 std::to_string(m));
            }
            cluster.push_back(static_cast<std::size_t>(idx));
        }
        if (cluster.empty()) {
            throw data_error(loc(path, li + 1) + ": empty cluster line");
        }
        std::sort(cluster.begin(), cluster.end());
        cluster.erase(std::unique(cluster.begin(), cluster.end()), cluster.end());
        clusters.push_back(std::move(cluster));
    }
    if (clusters.empty()) throw data_error(path.string() + ": empty file");
    return clusters;
}

void save_clusters(const std::filesystem::path& path,
                   const std::vector<std::vector<std::size_t>>& clusters) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    for (const auto& c : clusters) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (i) out << ' ';
            out << c[i];
        }
        out << '\n';
    }
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    std::uint64_t h = 1469598103934665603ull;
    char chunk[4096];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(chunk[i]);
            h *= 1099511628211ull;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

} // namespace rinmf
