#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rinmf/matrix.hpp"
#include "rinmf/rules.hpp"

namespace rinmf {

// Factorization variants. The *E forms regularize against the ideal matrix,
// the others against the rule cost matrix; MU and SP are unconstrained
// baselines. DF/DFE run the D/DE updates and differ only in how the harness
// builds their grouping.
enum class Variant {
    mu,
    d, de,
    df, dfe,
    gd, gde,
    gdbd, gdbde,
    obd, obde,
    hd, hde,
    sp,
};

Variant parse_variant(std::string_view name); // case-insensitive, config_error
std::string_view variant_name(Variant v);
const std::vector<Variant>& all_variants();

bool variant_uses_cost(Variant v);  // D, DF, GD, GDBD, OBD, HD
bool variant_uses_ideal(Variant v); // DE, DFE, GDE, GDBDE, OBDE, HDE
bool variant_is_mu_family(Variant v); // MU, D, DE, DF, DFE
bool variant_uses_rfa(Variant v);   // DF, DFE

// Constraint structure a solve() run optimizes against.
struct Constraints {
    enum class Mode { none, ideal, cost };
    Mode mode = Mode::none;
    Matrix f_tilde; // m x k binary (ideal mode)
    Matrix p;       // m x |R| binary (cost mode)
    Matrix a;       // k x |R| non-negative (cost mode)

    static Constraints none() { return {}; }
    static Constraints with_ideal(Matrix f_tilde);
    static Constraints with_cost(Matrix p, Matrix a);
};

struct SolverConfig {
    Variant variant = Variant::mu;
    std::size_t k = 2;
    double lambda_c = 1.0;                 // the c in lambda_value
    std::optional<double> lambda_override; // use this lambda directly
    std::size_t max_iters = 50000;
    double tolerance = 1e-8;
    double epsilon = 1e-9;
    bool normalize_f = false;
    bool hals_literal = false;
    bool gd_literal = false;
    std::uint64_t seed = 0;
    std::optional<double> step_size;       // GD/OBD/SP
    double bold_grow = 1.05;
    double bold_shrink = 0.5;
    double target_sparseness = 0.5;        // SP only
};

struct FactorModel {
    Matrix f;
    Matrix g;
    std::size_t iterations_run = 0;
    std::vector<double> objective_trace; // J at init, then after each iteration
    bool converged = false;
    double lambda = 0.0;                 // resolved value actually used
};

// J = ||X - F G^T||_F^2 plus the active penalty term
double objective(const Matrix& x, const Matrix& f, const Matrix& g,
                 const Constraints& c, double lambda);

// cost mode: c * ||X||_F / ||A||_F; ideal mode: c * ||X||_F; none: 0
double lambda_value(const SolverConfig& cfg, const Matrix& x, const Constraints& c);

// Uniform [0,1) entries with exact zeros replaced by 0.1, deterministic per
// seed. Draws use a fixed bit-mapping, not std::uniform_real_distribution,
// so streams replay across standard libraries.
std::pair<Matrix, Matrix> init_factors(std::size_t m, std::size_t n,
                                       std::size_t k, std::uint64_t seed);

// G <- max(eps, G .* (X^T F) ./ (G F^T F))
Matrix mu_step_g(const Matrix& x, const Matrix& f, const Matrix& g, double eps);

// cost:  F <- max(eps, F .* (X G + l P A^T) ./ (F G^T G + l P P^T F))
// ideal: F <- max(eps, F .* (X G + l F~)    ./ (F G^T G + l F))
// lambda = 0 runs the exact arithmetic of the plain Lee-Seung step.
Matrix mu_step_f(const Matrix& x, const Matrix& f, const Matrix& g,
                 const Constraints& c, double lambda, double eps);

// dJ/dF = 2 F G^T G - 2 X G + 2 l (P P^T F - P A^T)   (cost)
//       = 2 F G^T G - 2 X G + 2 l (F - F~)            (ideal)
Matrix grad_f(const Matrix& x, const Matrix& f, const Matrix& g,
              const Constraints& c, double lambda);

// Projected descent step on F. The default uses the full half-gradient
// F G^T G - X G + l(...); literal reproduces the printed rule that drops
// the X G term.
Matrix gd_step(const Matrix& x, const Matrix& f, const Matrix& g,
               const Constraints& c, double lambda, double gamma,
               bool literal = false);

// One bold-driver step: try gd_step at gamma; accept and grow on objective
// decrease, otherwise revert to f and shrink. Returns the next F and gamma.
// gamma below 1e-300 raises divergence_error.
std::pair<Matrix, double> gd_bold_driver_step(
    const Matrix& x, const Matrix& f, const Matrix& g, const Constraints& c,
    double lambda, double j_current, double gamma, double grow, double shrink,
    bool literal = false);

// Projected gradient step written on F^T in the source material; numerically
// the full-gradient descent step on F with clamp at 0.
Matrix oblique_step(const Matrix& x, const Matrix& f, const Matrix& g,
                    const Constraints& c, double lambda, double eta);

// Sequential HALS sweep over the columns of F with the penalty term folded
// in. Scaled form divides each updated column by max(g_j^T g_j, eps);
// literal keeps the printed unscaled rule. A column clamped to all-zero is
// reseeded from rng (uniform (0,1]).
Matrix hals_step(const Matrix& x, const Matrix& f, const Matrix& g,
                 const Constraints& c, double lambda, double eps,
                 bool literal, std::mt19937_64& rng);

// Closest non-negative vector with the given L1 and L2 norms (Hoyer).
std::vector<double> hoyer_project(std::span<const double> v, double l1_target,
                                  double l2_target);
// Same, with L2 kept from v and L1 chosen so the result has the target
// sparseness. v must not be all zero.
std::vector<double> hoyer_project_to_sparseness(std::span<const double> v,
                                                double target);

// Sparse baseline step: gradient move on F with per-row Hoyer projection to
// the target sparseness (row L2 preserved), multiplicative update on G.
// All-zero rows are reseeded from rng before projecting.
std::pair<Matrix, Matrix> sparse_nmf_step(const Matrix& x, const Matrix& f,
                                          const Matrix& g, double target_sparseness,
                                          double eps, double step,
                                          std::mt19937_64& rng);

using IterationObserver =
    std::function<void(std::size_t iter, const Matrix& f, const Matrix& g, double j)>;

// Full alternating optimization per the configured variant. Stops after
// max_iters or when |J_t - J_{t-1}| / max(J_{t-1}, 1e-30) < tolerance.
// The overload taking f0/g0 lets a harness share one init across variants.
FactorModel solve(const Matrix& x, const SolverConfig& cfg, const Constraints& c,
                  const IterationObserver& observer = {});
FactorModel solve(const Matrix& x, const SolverConfig& cfg, const Constraints& c,
                  Matrix f0, Matrix g0, const IterationObserver& observer = {});

// One numerical compensation: entity is described by rule but sits below its
// ideal membership value 1 in `factor`, while other members of the rule's
// support overshoot 1 and absorb the difference.
struct Compensation {
    std::size_t entity = 0;
    std::size_t factor = 0;
    std::size_t rule = 0;
    double deficit = 0.0;              // 1 - F[entity, factor]
    std::vector<std::size_t> donors;   // cluster members with F > 1
};

std::vector<Compensation> detect_compensations(const Matrix& f, const Matrix& ideal,
                                               const RuleSet& rs);

} // namespace rinmf
