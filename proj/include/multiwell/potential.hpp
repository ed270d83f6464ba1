#pragma once

#include "multiwell/common.hpp"

#include <string>
#include <variant>
#include <vector>

namespace mw {

/// V(x) = sum_k c[k] x^k with exact derivatives (Horner evaluation).
class Polynomial1D {
  public:
    explicit Polynomial1D(std::vector<double> coeffs);

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
    const std::vector<double>& coeffs() const { return c_; }

  private:
    std::vector<double> c_;
};

/// V(x,y) = sum c x^i y^j over a sparse term list, exact partials.
class Polynomial2D {
  public:
    struct Term {
        int i = 0, j = 0;
        double c = 0.0;
    };
    explicit Polynomial2D(std::vector<Term> terms);

    double value(double x, double y) const;
    void gradient(double x, double y, double& gx, double& gy) const;
    void hessian(double x, double y, double& hxx, double& hxy, double& hyy) const;
    const std::vector<Term>& terms() const { return terms_; }

  private:
    static double ipow(double b, int e);
    std::vector<Term> terms_;
};

// Potentials come from built-in analytic families declared in config, so
// gradients and Hessians are exact; there is no expression parser.
class Potential {
  public:
    Potential(std::string name, Polynomial1D p, Box box);
    Potential(std::string name, Polynomial2D p, Box box);

    int dim() const { return box_.dim; }
    const Box& box() const { return box_; }
    const std::string& name() const { return name_; }

    double value(const Vec& p) const;
    Vec gradient(const Vec& p) const;
    Mat hessian(const Vec& p) const;
    double laplacian(const Vec& p) const;

    bool is_polynomial1d() const { return std::holds_alternative<Polynomial1D>(impl_); }
    const Polynomial1D& poly1d() const { return std::get<Polynomial1D>(impl_); }
    const Polynomial2D& poly2d() const { return std::get<Polynomial2D>(impl_); }

  private:
    std::string name_;
    std::variant<Polynomial1D, Polynomial2D> impl_;
    Box box_;
};

/// Largest |grad V| among cell centers whose Gibbs weight is not negligible:
/// nodes are kept until the excluded tail of sum e^{-beta V} drops below
/// tail_mass of the total. Used by the generator resolution guard.
double gibbs_effective_grad_max(const Potential& V, const struct Grid& grid, double beta,
                                double tail_mass = 1e-12);

struct ConsistencyReport {
    double max_grad_rel_err = 0.0;
    double max_hess_rel_err = 0.0;
    bool pass = false;
};

/// Central finite-difference probe of the analytic gradient (tolerance 1e-5
/// relative) and Hessian (1e-4) at `probes` random interior points.
ConsistencyReport check_consistency(const Potential& V, int probes, std::uint64_t seed);

}  // namespace mw
