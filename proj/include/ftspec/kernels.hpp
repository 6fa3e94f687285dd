#pragma once

#include <string>

namespace ftspec {

enum class KernelFamily {
    InfinitelyDifferentiable,  // "ID"
    Trapezoid,                 // "TR"
    FlatTopParzen,             // "PR"
    EpanechnikovBaseline,      // "EPA"
};

/// Parametric flat-top function lambda (or the Epanechnikov baseline weight).
struct FlatTopSpec {
    KernelFamily family = KernelFamily::Trapezoid;
    double c = 0.5;
    double b = 0.25;
    double epsilon_ef = 0.01;

    [[nodiscard]] static FlatTopSpec infinitely_differentiable(double b = 0.25, double c = 0.05);
    [[nodiscard]] static FlatTopSpec trapezoid(double c = 0.5);
    [[nodiscard]] static FlatTopSpec flat_top_parzen(double c = 0.75);
    [[nodiscard]] static FlatTopSpec epanechnikov();

    [[nodiscard]] bool is_flat_top() const noexcept { return family != KernelFamily::EpanechnikovBaseline; }

    /// Throws DomainError when c, b or epsilon_ef are out of range for the family.
    void validate() const;

    /// Radius beyond which lambda vanishes: 1 for ID and TR, c + 1 for PR.
    [[nodiscard]] double support_radius() const;

    /// Short id used in tables: "TR", "PR", "ID", "EPA".
    [[nodiscard]] std::string id() const;

    /// {"family":"TR","c":0.5} style JSON.
    [[nodiscard]] std::string to_json() const;

    /// Accepts "TR", "TR:c=0.5", "ID:b=0.25,c=0.05", "EPA", or the JSON form.
    [[nodiscard]] static FlatTopSpec parse(const std::string& text);

    friend bool operator==(const FlatTopSpec&, const FlatTopSpec&) = default;
};

/// lambda(s). Throws UnsupportedError for the baseline family.
[[nodiscard]] double lambda_eval(const FlatTopSpec& spec, double s);

/// Lambda(x) = (1/pi) int_0^S lambda(s) cos(s x) ds by composite Gauss-Legendre quadrature.
[[nodiscard]] double capital_lambda(const FlatTopSpec& spec, double x);

/// Closed form of Lambda for the trapezoid family: (cos(cx) - cos(x)) / (pi (1-c) x^2).
[[nodiscard]] double capital_lambda_trapezoid_closed_form(double c, double x);

/// Periodized flat-top weight (1/2pi)[1 + 2 sum_{u>=1} lambda(B u) cos(x u)].
[[nodiscard]] double weight_function(const FlatTopSpec& spec, double bandwidth, double x);

/// Periodized Epanechnikov weight sum_j (1/B) W((x + 2 pi j)/B), W(x) = 3/4 (1 - x^2)^+.
[[nodiscard]] double baseline_weight(double bandwidth, double x);

/// Dispatches to weight_function or baseline_weight by family.
[[nodiscard]] double smoothing_weight(const FlatTopSpec& spec, double bandwidth, double x);

/// Largest c_ef with lambda(s) >= 1 - epsilon_ef on [-c_ef, c_ef], to 1e-6.
[[nodiscard]] double effective_flat_top_radius(const FlatTopSpec& spec);

/// int_{-R}^{R} x^k Lambda(x) dx; odd k returns exactly zero.
[[nodiscard]] double kernel_moment(const FlatTopSpec& spec, unsigned k, double truncation = 200.0);

/// Throws DomainError unless bandwidth lies in (0, 1].
void check_bandwidth(double bandwidth);

}  // namespace ftspec
