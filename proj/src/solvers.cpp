#include "rinmf/solvers.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

#include "rinmf/rand.hpp"

namespace rinmf {

namespace {

constexpr double kTiny = 1e-300;

struct VariantRow {
    Variant v;
    const char* name;
    bool cost;
    bool ideal;
    bool mu_family;
    bool rfa;
};

constexpr std::array<VariantRow, 14> kVariants{{
    {Variant::mu, "MU", false, false, true, false},
    {Variant::d, "D", true, false, true, false},
    {Variant::de, "DE", false, true, true, false},
    {Variant::df, "DF", true, false, true, true},
    {Variant::dfe, "DFE", false, true, true, true},
    {Variant::gd, "GD", true, false, false, false},
    {Variant::gde, "GDE", false, true, false, false},
    {Variant::gdbd, "GDBD", true, false, false, false},
    {Variant::gdbde, "GDBDE", false, true, false, false},
    {Variant::obd, "OBD", true, false, false, false},
    {Variant::obde, "OBDE", false, true, false, false},
    {Variant::hd, "HD", true, false, false, false},
    {Variant::hde, "HDE", false, true, false, false},
    {Variant::sp, "SP", false, false, false, false},
}};

const VariantRow& row_of(Variant v) {
    for (const auto& r : kVariants) {
        if (r.v == v) return r;
    }
    throw config_error("unknown variant enum value");
}

double sq_frobenius_distance(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw shape_error("objective: shapes " + a.shape() + " and " + b.shape() +
                          " differ");
    }
    double acc = 0.0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = da[i] - db[i];
        acc += d * d;
    }
    return acc;
}

void check_model_shapes(const Matrix& x, const Matrix& f, const Matrix& g) {
    if (f.rows() != x.rows() || g.rows() != x.cols() || f.cols() != g.cols()) {
        throw shape_error("factor shapes " + f.shape() + ", " + g.shape() +
                          " do not fit data " + x.shape());
    }
}

void check_constraint_shapes(const Matrix& x, std::size_t k, const Constraints& c) {
    if (c.mode == Constraints::Mode::ideal) {
        if (c.f_tilde.rows() != x.rows() || c.f_tilde.cols() != k) {
            throw shape_error("ideal matrix is " + c.f_tilde.shape() + ", expected " +
                              std::to_string(x.rows()) + "x" + std::to_string(k));
        }
    } else if (c.mode == Constraints::Mode::cost) {
        if (c.p.rows() != x.rows()) {
            throw shape_error("rule matrix P is " + c.p.shape() + " for data " +
                              x.shape());
        }
        if (c.a.rows() != k || c.a.cols() != c.p.cols()) {
            throw shape_error("cost matrix A is " + c.a.shape() + ", expected " +
                              std::to_string(k) + "x" + std::to_string(c.p.cols()));
        }
    }
}

// P (P^T F) without forming the m x m product
Matrix ppt_f(const Matrix& p, const Matrix& f) {
    return matmul(p, matmul_at_b(p, f));
}

// P A^T
Matrix p_at(const Matrix& p, const Matrix& a) {
    return matmul_a_bt(p, a);
}

void clamp_nonnegative(Matrix& m) {
    for (double& v : m.data()) {
        if (v < 0.0) v = 0.0;
    }
}

void validate_config(const SolverConfig& cfg) {
    if (cfg.k == 0) throw config_error("k must be at least 1");
    if (!(cfg.epsilon > 0.0)) throw config_error("epsilon must be positive");
    if (!(cfg.tolerance >= 0.0)) throw config_error("tolerance must be non-negative");
    if (!(cfg.lambda_c >= 0.0)) throw config_error("c must be non-negative");
    if (cfg.lambda_override && !(*cfg.lambda_override >= 0.0)) {
        throw config_error("lambda must be non-negative");
    }
    if (!(cfg.bold_grow > 1.0) || !(cfg.bold_shrink > 0.0) ||
        !(cfg.bold_shrink < 1.0)) {
        throw config_error("bold driver factors must satisfy grow > 1 > shrink > 0");
    }
    if (cfg.step_size && !(*cfg.step_size > 0.0)) {
        throw config_error("step size must be positive");
    }
    if (!(cfg.target_sparseness >= 0.0) || !(cfg.target_sparseness <= 1.0)) {
        throw config_error("target sparseness must lie in [0,1]");
    }
    if (cfg.max_iters == 0) throw config_error("max iterations must be at least 1");
}

} // namespace

Variant parse_variant(std::string_view name) {
    std::string up(name);
    for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    for (const auto& r : kVariants) {
        if (up == r.name) return r.v;
    }
    throw config_error("unknown variant '" + std::string(name) + "'");
}

std::string_view variant_name(Variant v) { return row_of(v).name; }

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> all = [] {
        std::vector<Variant> out;
        for (const auto& r : kVariants) out.push_back(r.v);
        return out;
    }();
    return all;
}

bool variant_uses_cost(Variant v) { return row_of(v).cost; }
bool variant_uses_ideal(Variant v) { return row_of(v).ideal; }
bool variant_is_mu_family(Variant v) { return row_of(v).mu_family; }
bool variant_uses_rfa(Variant v) { return row_of(v).rfa; }

Constraints Constraints::with_ideal(Matrix f_tilde) {
    for (double v : f_tilde.data()) {
        if (v != 0.0 && v != 1.0) {
            throw domain_error("ideal matrix must be binary");
        }
    }
    Constraints c;
    c.mode = Mode::ideal;
    c.f_tilde = std::move(f_tilde);
    return c;
}

Constraints Constraints::with_cost(Matrix p, Matrix a) {
    for (double v : p.data()) {
        if (v != 0.0 && v != 1.0) {
            throw domain_error("rule matrix P must be binary");
        }
    }
    for (double v : a.data()) {
        if (v < 0.0) throw domain_error("cost matrix A must be non-negative");
    }
    if (p.cols() != a.cols()) {
        throw shape_error("constraints: P is " + p.shape() + " but A is " + a.shape());
    }
    Constraints c;
    c.mode = Mode::cost;
    c.p = std::move(p);
    c.a = std::move(a);
    return c;
}

double objective(const Matrix& x, const Matrix& f, const Matrix& g,
                 const Constraints& c, double lambda) {
    check_model_shapes(x, f, g);
    double j = sq_frobenius_distance(x, matmul_a_bt(f, g));
    if (lambda != 0.0 && c.mode != Constraints::Mode::none) {
        check_constraint_shapes(x, f.cols(), c);
        if (c.mode == Constraints::Mode::ideal) {
            j += lambda * sq_frobenius_distance(f, c.f_tilde);
        } else {
            j += lambda * sq_frobenius_distance(c.a, matmul_at_b(f, c.p));
        }
    }
    return j;
}

double lambda_value(const SolverConfig& cfg, const Matrix& x, const Constraints& c) {
    if (cfg.lambda_override) return *cfg.lambda_override;
    if (variant_uses_cost(cfg.variant)) {
        if (c.mode != Constraints::Mode::cost) {
            throw config_error("variant " + std::string(variant_name(cfg.variant)) +
                               " needs cost constraints");
        }
        const double na = frobenius_norm(c.a);
        if (na == 0.0) {
            throw config_error("degenerate constraints: ||A||_F = 0");
        }
        return cfg.lambda_c * frobenius_norm(x) / na;
    }
    if (variant_uses_ideal(cfg.variant)) {
        return cfg.lambda_c * frobenius_norm(x);
    }
    return 0.0;
}

std::pair<Matrix, Matrix> init_factors(std::size_t m, std::size_t n,
                                       std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto fill = [&rng](Matrix& mat) {
        for (double& v : mat.data()) {
            const double u = uniform01(rng);
            v = (u == 0.0) ? 0.1 : u;
        }
    };
    Matrix f(m, k), g(n, k);
    fill(f);
    fill(g);
    return {std::move(f), std::move(g)};
}

Matrix mu_step_g(const Matrix& x, const Matrix& f, const Matrix& g, double eps) {
    check_model_shapes(x, f, g);
    const Matrix num = matmul_at_b(x, f);      // n x k
    const Matrix den = matmul(g, matmul_at_b(f, f));
    Matrix out(g.rows(), g.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = std::max(eps, g.data()[i] * num.data()[i] / den.data()[i]);
    }
    return out;
}

Matrix mu_step_f(const Matrix& x, const Matrix& f, const Matrix& g,
                 const Constraints& c, double lambda, double eps) {
    check_model_shapes(x, f, g);
    Matrix num = matmul(x, g);                 // m x k
    Matrix den = matmul(f, matmul_at_b(g, g));
    if (lambda != 0.0 && c.mode != Constraints::Mode::none) {
        check_constraint_shapes(x, f.cols(), c);
        if (c.mode == Constraints::Mode::ideal) {
            for (std::size_t i = 0; i < num.size(); ++i) {
                num.data()[i] += lambda * c.f_tilde.data()[i];
                den.data()[i] += lambda * f.data()[i];
            }
        } else {
            const Matrix pat = p_at(c.p, c.a);
            const Matrix pptf = ppt_f(c.p, f);
            for (std::size_t i = 0; i < num.size(); ++i) {
                num.data()[i] += lambda * pat.data()[i];
                den.data()[i] += lambda * pptf.data()[i];
            }
        }
    }
    Matrix out(f.rows(), f.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = std::max(eps, f.data()[i] * num.data()[i] / den.data()[i]);
    }
    return out;
}

Matrix grad_f(const Matrix& x, const Matrix& f, const Matrix& g,
              const Constraints& c, double lambda) {
    check_model_shapes(x, f, g);
    const Matrix fgtg = matmul(f, matmul_at_b(g, g));
    const Matrix xg = matmul(x, g);
    Matrix grad(f.rows(), f.cols());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad.data()[i] = 2.0 * (fgtg.data()[i] - xg.data()[i]);
    }
    if (lambda != 0.0 && c.mode != Constraints::Mode::none) {
        check_constraint_shapes(x, f.cols(), c);
        if (c.mode == Constraints::Mode::ideal) {
            for (std::size_t i = 0; i < grad.size(); ++i) {
                grad.data()[i] += 2.0 * lambda * (f.data()[i] - c.f_tilde.data()[i]);
            }
        } else {
            const Matrix pptf = ppt_f(c.p, f);
            const Matrix pat = p_at(c.p, c.a);
            for (std::size_t i = 0; i < grad.size(); ++i) {
                grad.data()[i] += 2.0 * lambda * (pptf.data()[i] - pat.data()[i]);
            }
        }
    }
    return grad;
}

Matrix gd_step(const Matrix& x, const Matrix& f, const Matrix& g,
               const Constraints& c, double lambda, double gamma, bool literal) {
    if (!(gamma > 0.0)) throw config_error("gd_step: gamma must be positive");
    check_model_shapes(x, f, g);
    Matrix step = matmul(f, matmul_at_b(g, g));
    if (!literal) {
        const Matrix xg = matmul(x, g);
        for (std::size_t i = 0; i < step.size(); ++i) step.data()[i] -= xg.data()[i];
    }
    if (lambda != 0.0 && c.mode != Constraints::Mode::none) {
        check_constraint_shapes(x, f.cols(), c);
        if (c.mode == Constraints::Mode::ideal) {
            for (std::size_t i = 0; i < step.size(); ++i) {
                step.data()[i] += lambda * (f.data()[i] - c.f_tilde.data()[i]);
            }
        } else {
            const Matrix pptf = ppt_f(c.p, f);
            const Matrix pat = p_at(c.p, c.a);
            for (std::size_t i = 0; i < step.size(); ++i) {
                step.data()[i] += lambda * (pptf.data()[i] - pat.data()[i]);
            }
        }
    }
    Matrix out(f.rows(), f.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = f.data()[i] - gamma * step.data()[i];
    }
    clamp_nonnegative(out);
    return out;
}

std::pair<Matrix, double> gd_bold_driver_step(
    const Matrix& x, const Matrix& f, const Matrix& g, const Constraints& c,
    double lambda, double j_current, double gamma, double grow, double shrink,
    bool literal) {
    if (gamma < kTiny) {
        throw divergence_error("bold driver: step size underflow below 1e-300");
    }
    Matrix cand = gd_step(x, f, g, c, lambda, gamma, literal);
    const double jc = objective(x, cand, g, c, lambda);
    if (std::isfinite(jc) && jc <= j_current) {
        return {std::move(cand), gamma * grow};
    }
    return {f, gamma * shrink};
}

Matrix oblique_step(const Matrix& x, const Matrix& f, const Matrix& g,
                    const Constraints& c, double lambda, double eta) {
    // the printed rule is the transpose of the full-gradient projected step
    return gd_step(x, f, g, c, lambda, eta, false);
}

Matrix hals_step(const Matrix& x, const Matrix& f, const Matrix& g,
                 const Constraints& c, double lambda, double eps,
                 bool literal, std::mt19937_64& rng) {
    check_model_shapes(x, f, g);
    const bool use_cost = lambda != 0.0 && c.mode == Constraints::Mode::cost;
    const bool use_ideal = lambda != 0.0 && c.mode == Constraints::Mode::ideal;
    if (use_cost || use_ideal) check_constraint_shapes(x, f.cols(), c);

    const std::size_t m = x.rows();
    const std::size_t n = x.cols();
    const std::size_t k = f.cols();
    Matrix out = f;
    Matrix pat;
    if (use_cost) pat = p_at(c.p, c.a);

    // residual carried across the sweep: X - (current F) G^T
    Matrix resid = x;
    {
        const Matrix fg = matmul_a_bt(out, g);
        for (std::size_t i = 0; i < resid.size(); ++i) {
            resid.data()[i] -= fg.data()[i];
        }
    }

    std::vector<double> v(m);
    for (std::size_t j = 0; j < k; ++j) {
        double gg = 0.0;
        for (std::size_t l = 0; l < n; ++l) gg += g(l, j) * g(l, j);
        // X^(j) g_j = resid g_j + f_j (g_j . g_j)
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t l = 0; l < n; ++l) acc += resid(i, l) * g(l, j);
            v[i] = acc + out(i, j) * gg;
        }
        if (use_cost) {
            // lambda (P a_j^T - P P^T f_j)
            std::vector<double> ptf(c.p.cols(), 0.0);
            for (std::size_t r = 0; r < c.p.cols(); ++r) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += c.p(i, r) * out(i, j);
                ptf[r] = acc;
            }
            for (std::size_t i = 0; i < m; ++i) {
                double acc = 0.0;
                for (std::size_t r = 0; r < c.p.cols(); ++r) acc += c.p(i, r) * ptf[r];
                v[i] += lambda * (pat(i, j) - acc);
            }
        } else if (use_ideal) {
            for (std::size_t i = 0; i < m; ++i) {
                v[i] += lambda * (c.f_tilde(i, j) - out(i, j));
            }
        }
        bool all_zero = true;
        for (std::size_t i = 0; i < m; ++i) {
            if (v[i] < 0.0) v[i] = 0.0;
            if (!literal) v[i] /= std::max(gg, eps);
            if (v[i] != 0.0) all_zero = false;
        }
        if (all_zero) {
            // collapsed column; reseed like init_factors does
            for (std::size_t i = 0; i < m; ++i) {
                const double u = uniform01(rng);
                v[i] = (u == 0.0) ? 0.1 : u;
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t l = 0; l < n; ++l) {
                resid(i, l) += (out(i, j) - v[i]) * g(l, j);
            }
            out(i, j) = v[i];
        }
    }
    return out;
}

std::vector<double> hoyer_project(std::span<const double> v, double l1_target,
                                  double l2_target) {
    const std::size_t dim = v.size();
    if (dim == 0) throw domain_error("hoyer_project: empty vector");
    if (!(l2_target > 0.0) || !(l1_target > 0.0)) {
        throw domain_error("hoyer_project: norm targets must be positive");
    }
    const double sqrt_dim = std::sqrt(static_cast<double>(dim));
    if (l1_target < l2_target * (1.0 - 1e-9) ||
        l1_target > l2_target * sqrt_dim * (1.0 + 1e-9)) {
        throw domain_error("hoyer_project: infeasible norm pair");
    }

    std::vector<double> s(v.begin(), v.end());
    std::vector<char> zeroed(dim, 0);
    std::size_t free_count = dim;
    {
        double sum = 0.0;
        for (double x : s) sum += x;
        const double shift = (l1_target - sum) / static_cast<double>(dim);
        for (double& x : s) x += shift;
    }
    for (std::size_t pass = 0; pass <= dim; ++pass) {
        const double mid = l1_target / static_cast<double>(free_count);
        double a = 0.0, b = 0.0, cq = -l2_target * l2_target;
        for (std::size_t i = 0; i < dim; ++i) {
            if (zeroed[i]) continue;
            const double w = s[i] - mid;
            a += w * w;
            b += 2.0 * mid * w;
            cq += mid * mid;
        }
        double alpha = 0.0;
        if (a > 0.0) {
            const double disc = std::max(0.0, b * b - 4.0 * a * cq);
            alpha = (-b + std::sqrt(disc)) / (2.0 * a);
        }
        bool feasible = true;
        for (std::size_t i = 0; i < dim; ++i) {
            if (zeroed[i]) continue;
            s[i] = mid + alpha * (s[i] - mid);
            if (s[i] < 0.0) feasible = false;
        }
        if (feasible) return s;
        double sum = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            if (zeroed[i]) continue;
            if (s[i] < 0.0) {
                s[i] = 0.0;
                zeroed[i] = 1;
                --free_count;
            } else {
                sum += s[i];
            }
        }
        if (free_count == 0) break;
        const double shift = (sum - l1_target) / static_cast<double>(free_count);
        for (std::size_t i = 0; i < dim; ++i) {
            if (!zeroed[i]) s[i] -= shift;
        }
    }
    // rounding drove everything to zero: fall back to a single spike
    std::vector<double> spike(dim, 0.0);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < dim; ++i) {
        if (v[i] > v[arg]) arg = i;
    }
    spike[arg] = l2_target;
    return spike;
}

std::vector<double> hoyer_project_to_sparseness(std::span<const double> v,
                                                double target) {
    if (!(target >= 0.0) || !(target <= 1.0)) {
        throw domain_error("hoyer_project_to_sparseness: target outside [0,1]");
    }
    double l2sq = 0.0;
    for (double x : v) l2sq += x * x;
    if (l2sq == 0.0) throw domain_error("hoyer_project_to_sparseness: zero vector");
    const double l2 = std::sqrt(l2sq);
    const double sqrt_dim = std::sqrt(static_cast<double>(v.size()));
    // at the boundaries the feasible set is a single point; return it exactly
    // rather than losing digits to the iterative solve
    if (target == 0.0) {
        return std::vector<double>(v.size(), l2 / sqrt_dim);
    }
    if (target == 1.0) {
        std::vector<double> spike(v.size(), 0.0);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i] > v[arg]) arg = i;
        }
        spike[arg] = l2;
        return spike;
    }
    const double l1 = l2 * (sqrt_dim - target * (sqrt_dim - 1.0));
    return hoyer_project(v, l1, l2);
}

std::pair<Matrix, Matrix> sparse_nmf_step(const Matrix& x, const Matrix& f,
                                          const Matrix& g, double target_sparseness,
                                          double eps, double step,
                                          std::mt19937_64& rng) {
    check_model_shapes(x, f, g);
    if (!(step > 0.0)) throw config_error("sparse_nmf_step: step must be positive");
    const Matrix fgtg = matmul(f, matmul_at_b(g, g));
    const Matrix xg = matmul(x, g);
    Matrix nf(f.rows(), f.cols());
    for (std::size_t i = 0; i < nf.size(); ++i) {
        nf.data()[i] = f.data()[i] - step * (fgtg.data()[i] - xg.data()[i]);
    }
    for (std::size_t i = 0; i < nf.rows(); ++i) {
        auto row = nf.row(i);
        double l2sq = 0.0;
        for (double x_ : row) l2sq += x_ * x_;
        if (l2sq == 0.0) {
            for (double& x_ : row) {
                const double u = uniform01(rng);
                x_ = (u == 0.0) ? 0.1 : u;
            }
        }
        const auto projected = hoyer_project_to_sparseness(row, target_sparseness);
        std::copy(projected.begin(), projected.end(), row.begin());
    }
    Matrix ng = mu_step_g(x, nf, g, eps);
    return {std::move(nf), std::move(ng)};
}

FactorModel solve(const Matrix& x, const SolverConfig& cfg, const Constraints& c,
                  const IterationObserver& observer) {
    validate_config(cfg);
    auto [f0, g0] = init_factors(x.rows(), x.cols(), cfg.k, cfg.seed);
    return solve(x, cfg, c, std::move(f0), std::move(g0), observer);
}

FactorModel solve(const Matrix& x, const SolverConfig& cfg, const Constraints& c,
                  Matrix f0, Matrix g0, const IterationObserver& observer) {
    validate_config(cfg);
    bool any_positive = false;
    for (double v : x.data()) {
        if (v < 0.0) throw domain_error("solve: X has negative entries");
        if (v > 0.0) any_positive = true;
    }
    if (!any_positive) throw domain_error("solve: X is all zero");

    const Variant v = cfg.variant;
    const auto expected = variant_uses_cost(v)    ? Constraints::Mode::cost
                          : variant_uses_ideal(v) ? Constraints::Mode::ideal
                                                  : Constraints::Mode::none;
    if (c.mode != expected) {
        throw config_error("variant " + std::string(variant_name(v)) +
                           " expects " +
                           (expected == Constraints::Mode::cost    ? "cost"
                            : expected == Constraints::Mode::ideal ? "ideal"
                                                                   : "no") +
                           " constraints");
    }
    check_model_shapes(x, f0, g0);
    if (f0.cols() != cfg.k) {
        throw config_error("initial factors have k=" + std::to_string(f0.cols()) +
                           " but config says k=" + std::to_string(cfg.k));
    }
    check_constraint_shapes(x, cfg.k, c);
    for (double val : f0.data()) {
        if (val < 0.0) throw domain_error("solve: initial F has negative entries");
    }
    for (double val : g0.data()) {
        if (val < 0.0) throw domain_error("solve: initial G has negative entries");
    }

    const double lambda = lambda_value(cfg, x, c);
    const double eps = cfg.epsilon;
    std::mt19937_64 rng(cfg.seed); // column/row reseed stream (HALS, SP)

    // ||P P^T||_F through the small Gram matrix; same singular values
    double reg_norm = 0.0;
    if (c.mode == Constraints::Mode::cost) {
        reg_norm = frobenius_norm(matmul_at_b(c.p, c.p));
    } else if (c.mode == Constraints::Mode::ideal) {
        reg_norm = std::sqrt(static_cast<double>(x.rows()));
    }

    Matrix f = std::move(f0);
    Matrix g = std::move(g0);

    FactorModel out;
    out.lambda = lambda;
    double j = objective(x, f, g, c, lambda);
    if (!std::isfinite(j)) {
        throw divergence_error("solve: non-finite objective at initialization");
    }
    out.objective_trace.push_back(j);

    double gamma = 0.0;
    if (v == Variant::gdbd || v == Variant::gdbde) {
        gamma = 1.0 / std::max(frobenius_norm(matmul_at_b(g, g)), kTiny);
    }

    auto default_step = [&]() {
        if (cfg.step_size) return *cfg.step_size;
        const double base = frobenius_norm(matmul_at_b(g, g)) + lambda * reg_norm;
        return 1.0 / std::max(base, kTiny);
    };

    auto normalize = [&]() {
        for (std::size_t col = 0; col < f.cols(); ++col) {
            double mx = 0.0;
            for (std::size_t i = 0; i < f.rows(); ++i) mx = std::max(mx, f(i, col));
            scale_column_pair(f, g, col, std::max(mx, eps));
        }
    };

    for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
        if (v == Variant::sp) {
            auto [nf, ng] = sparse_nmf_step(x, f, g, cfg.target_sparseness, eps,
                                            default_step(), rng);
            f = std::move(nf);
            g = std::move(ng);
            if (cfg.normalize_f) normalize();
        } else {
            switch (v) {
            case Variant::mu:
            case Variant::d:
            case Variant::de:
            case Variant::df:
            case Variant::dfe:
                f = mu_step_f(x, f, g, c, lambda, eps);
                break;
            case Variant::gd:
            case Variant::gde:
                f = gd_step(x, f, g, c, lambda, default_step(), cfg.gd_literal);
                break;
            case Variant::gdbd:
            case Variant::gdbde: {
                auto [nf, ngamma] = gd_bold_driver_step(
                    x, f, g, c, lambda, out.objective_trace.back(), gamma,
                    cfg.bold_grow, cfg.bold_shrink, cfg.gd_literal);
                f = std::move(nf);
                gamma = ngamma;
                break;
            }
            case Variant::obd:
            case Variant::obde:
                f = oblique_step(x, f, g, c, lambda, default_step());
                break;
            case Variant::hd:
            case Variant::hde:
                f = hals_step(x, f, g, c, lambda, eps, cfg.hals_literal, rng);
                break;
            default:
                throw config_error("unhandled variant");
            }
            if (cfg.normalize_f) normalize();
            g = mu_step_g(x, f, g, eps);
        }

        j = objective(x, f, g, c, lambda);
        if (!std::isfinite(j)) {
            throw divergence_error("solve: non-finite objective at iteration " +
                                   std::to_string(iter));
        }
        const double prev = out.objective_trace.back();
        out.objective_trace.push_back(j);
        out.iterations_run = iter;
        if (observer) observer(iter, f, g, j);
        if (std::abs(j - prev) / std::max(prev, 1e-30) < cfg.tolerance) {
            out.converged = true;
            break;
        }
    }

    out.f = std::move(f);
    out.g = std::move(g);
    return out;
}

std::vector<Compensation> detect_compensations(const Matrix& f, const Matrix& ideal,
                                               const RuleSet& rs) {
    if (!f.same_shape(ideal)) {
        throw shape_error("detect_compensations: F is " + f.shape() +
                          " but ideal is " + ideal.shape());
    }
    if (f.rows() != rs.entity_count()) {
        throw shape_error("detect_compensations: F has " + std::to_string(f.rows()) +
                          " rows for m=" + std::to_string(rs.entity_count()));
    }
    std::vector<Compensation> out;
    for (std::size_t i = 0; i < f.cols(); ++i) {
        for (std::size_t j = 0; j < rs.size(); ++j) {
            const auto& supp = rs[j].support;
            for (std::size_t r : supp) {
                if (ideal(r, i) != 1.0 || !(f(r, i) < 1.0)) continue;
                std::vector<std::size_t> donors;
                for (std::size_t z : supp) {
                    if (z == r) continue;
                    if (ideal(z, i) == 1.0 && f(z, i) > 1.0) donors.push_back(z);
                }
                if (donors.empty()) continue;
                Compensation rec;
                rec.entity = r;
                rec.factor = i;
                rec.rule = j;
                rec.deficit = 1.0 - f(r, i);
                rec.donors = std::move(donors);
                out.push_back(std::move(rec));
            }
        }
    }
    return out;
}

} // namespace rinmf
