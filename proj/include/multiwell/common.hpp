#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mw {

// Points and Hessians live in fixed 2-vectors; for 1-d problems only
// component 0 is meaningful and the rest is kept at zero.
using Vec = Eigen::Vector2d;
using Mat = Eigen::Matrix2d;

inline Vec make_vec(double x) { return Vec(x, 0.0); }
inline Vec make_vec(double x, double y) { return Vec(x, y); }

/// Axis-aligned bounding box, dimension 1 or 2.
struct Box {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};

    static Box interval(double a, double b) { return Box{1, {a, 0.0}, {b, 0.0}}; }
    static Box rect(double ax, double bx, double ay, double by) {
        return Box{2, {ax, ay}, {bx, by}};
    }

    double extent(int axis) const { return hi[axis] - lo[axis]; }
    bool contains(const Vec& p, double slack = 0.0) const {
        for (int a = 0; a < dim; ++a)
            if (p[a] < lo[a] - slack || p[a] > hi[a] + slack) return false;
        return true;
    }
    double diameter() const {
        double s = 0;
        for (int a = 0; a < dim; ++a) s += extent(a) * extent(a);
        return std::sqrt(s);
    }
    bool operator==(const Box& o) const {
        return dim == o.dim && lo == o.lo && hi == o.hi;
    }
};

// ---------------------------------------------------------------------------
// Error hierarchy. Hard numerical failures derive from Error; the CLI maps
// them to exit code 3. Configuration problems use ConfigError (exit code 2).
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define MW_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                        \
      public:                                                          \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

MW_DEFINE_ERROR(NoConvergence);
MW_DEFINE_ERROR(SaddleRefinementFailed);
MW_DEFINE_ERROR(ResolutionTooCoarse);
MW_DEFINE_ERROR(ResolutionGuardFailed);
MW_DEFINE_ERROR(DegenerateInput);
MW_DEFINE_ERROR(AssumptionViolated);
MW_DEFINE_ERROR(GridMismatch);
MW_DEFINE_ERROR(SolverStagnation);
MW_DEFINE_ERROR(CutoffOverlap);
MW_DEFINE_ERROR(DeltaTooLarge);
MW_DEFINE_ERROR(UnstableStep);
MW_DEFINE_ERROR(HorizonExceeded);

#undef MW_DEFINE_ERROR

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Extended real line with a dedicated +infinity marker. Functionals J, J_k
// take the value +infinity off their support; comparisons must stay total,
// so the marker is an explicit state rather than a float overflow.
// ---------------------------------------------------------------------------

class ExtReal {
  public:
    ExtReal() : finite_(true), v_(0.0) {}
    ExtReal(double v) : finite_(true), v_(v) {}
    static ExtReal infinity() {
        ExtReal r;
        r.finite_ = false;
        return r;
    }

    bool is_finite() const { return finite_; }
    double value() const {
        if (!finite_) throw Error("ExtReal: value() on +infinity marker");
        return v_;
    }
    double value_or(double inf_stand_in) const { return finite_ ? v_ : inf_stand_in; }

    friend bool operator<(const ExtReal& a, const ExtReal& b) {
        if (!a.finite_) return false;            // inf < anything is false
        if (!b.finite_) return true;             // finite < inf
        return a.v_ < b.v_;
    }
    friend bool operator==(const ExtReal& a, const ExtReal& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.v_ == b.v_;
    }
    friend bool operator<=(const ExtReal& a, const ExtReal& b) { return a < b || a == b; }

  private:
    bool finite_;
    double v_;
};

/// Default tolerances shared across modules (energy units where applicable).
struct Tolerances {
    double grad_tol = 1e-8;        // |grad V| at accepted critical points
    double degeneracy_tol = 1e-6;  // |xi_i| below this flags a degenerate Hessian
    double tie_tol = 1e-6;         // barrier/saddle level ties (A.4, A.5)
    double solver_tol = 1e-10;     // eigensolver residual target
    double floor_tol = 1e-300;     // density floor before square roots
};

}  // namespace mw
