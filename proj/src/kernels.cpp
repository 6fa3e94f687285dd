#include "ftspec/kernels.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <json.hpp>

#include "ftspec/errors.hpp"

namespace ftspec {
namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

void require_flat_top(const FlatTopSpec& spec, const char* what) {
    if (!spec.is_flat_top()) {
        throw UnsupportedError(std::string(what) +
                               " is not defined for the Epanechnikov baseline (it has no flat-top function)");
    }
}

// Integrates f over [a, b] with n equal Gauss-Legendre panels.
template <typename F>
double composite_gauss(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double lo = a + k * h;
        const double hi = (k + 1 == n) ? b : lo + h;
        sum += Gauss::integrate(f, lo, hi);
    }
    return sum;
}

KernelFamily parse_family(const std::string& name) {
    if (name == "TR" || name == "TRAPEZOID") return KernelFamily::Trapezoid;
    if (name == "PR" || name == "FLAT_TOP_PARZEN") return KernelFamily::FlatTopParzen;
    if (name == "ID" || name == "INFINITELY_DIFFERENTIABLE") return KernelFamily::InfinitelyDifferentiable;
    if (name == "EPA" || name == "EPANECHNIKOV_BASELINE") return KernelFamily::EpanechnikovBaseline;
    throw ParseError("unknown kernel family '" + name + "'");
}

FlatTopSpec defaults_for(KernelFamily family) {
    switch (family) {
        case KernelFamily::InfinitelyDifferentiable: return FlatTopSpec::infinitely_differentiable();
        case KernelFamily::Trapezoid: return FlatTopSpec::trapezoid();
        case KernelFamily::FlatTopParzen: return FlatTopSpec::flat_top_parzen();
        case KernelFamily::EpanechnikovBaseline: return FlatTopSpec::epanechnikov();
    }
    return FlatTopSpec{};
}

}  // namespace

FlatTopSpec FlatTopSpec::infinitely_differentiable(double b, double c) {
    return {KernelFamily::InfinitelyDifferentiable, c, b, 0.01};
}
FlatTopSpec FlatTopSpec::trapezoid(double c) { return {KernelFamily::Trapezoid, c, 0.0, 0.01}; }
FlatTopSpec FlatTopSpec::flat_top_parzen(double c) { return {KernelFamily::FlatTopParzen, c, 0.0, 0.01}; }
FlatTopSpec FlatTopSpec::epanechnikov() { return {KernelFamily::EpanechnikovBaseline, 0.0, 0.0, 0.01}; }

void FlatTopSpec::validate() const {
    switch (family) {
        case KernelFamily::InfinitelyDifferentiable:
            if (!(b > 0.0)) throw DomainError("ID kernel needs b > 0");
            [[fallthrough]];
        case KernelFamily::Trapezoid:
            if (!(c > 0.0 && c < 1.0)) throw DomainError(id() + " kernel needs 0 < c < 1");
            break;
        case KernelFamily::FlatTopParzen:
            if (!(c > 0.0)) throw DomainError("PR kernel needs c > 0");
            break;
        case KernelFamily::EpanechnikovBaseline:
            return;
    }
    if (!(epsilon_ef > 0.0 && epsilon_ef < 1.0)) throw DomainError("epsilon_ef must lie in (0, 1)");
}

double FlatTopSpec::support_radius() const {
    switch (family) {
        case KernelFamily::FlatTopParzen: return c + 1.0;
        case KernelFamily::EpanechnikovBaseline: return 1.0;
        default: return 1.0;
    }
}

std::string FlatTopSpec::id() const {
    switch (family) {
        case KernelFamily::InfinitelyDifferentiable: return "ID";
        case KernelFamily::Trapezoid: return "TR";
        case KernelFamily::FlatTopParzen: return "PR";
        case KernelFamily::EpanechnikovBaseline: return "EPA";
    }
    return "?";
}

std::string FlatTopSpec::to_json() const {
    nlohmann::ordered_json j;
    j["family"] = id();
    if (family == KernelFamily::InfinitelyDifferentiable) j["b"] = b;
    if (is_flat_top()) j["c"] = c;
    return j.dump();
}

FlatTopSpec FlatTopSpec::parse(const std::string& text) {
    FlatTopSpec spec;
    if (!text.empty() && text.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("kernel spec JSON: ") + e.what());
        }
        if (!j.contains("family") || !j["family"].is_string()) throw ParseError("kernel spec JSON needs a 'family' string");
        spec = defaults_for(parse_family(j["family"].get<std::string>()));
        if (j.contains("c")) spec.c = j["c"].get<double>();
        if (j.contains("b")) spec.b = j["b"].get<double>();
        if (j.contains("epsilon_ef")) spec.epsilon_ef = j["epsilon_ef"].get<double>();
    } else {
        const auto colon = text.find(':');
        spec = defaults_for(parse_family(text.substr(0, colon)));
        if (colon != std::string::npos) {
            std::stringstream params(text.substr(colon + 1));
            std::string item;
            while (std::getline(params, item, ',')) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) throw ParseError("kernel parameter '" + item + "' is not key=value");
                const std::string key = item.substr(0, eq);
                double value = 0.0;
                try {
                    value = std::stod(item.substr(eq + 1));
                } catch (const std::exception&) {
                    throw ParseError("kernel parameter '" + item + "' has a non-numeric value");
                }
                if (key == "c") spec.c = value;
                else if (key == "b") spec.b = value;
                else if (key == "eps" || key == "epsilon_ef") spec.epsilon_ef = value;
                else throw ParseError("unknown kernel parameter '" + key + "'");
            }
        }
    }
    spec.validate();
    return spec;
}

double lambda_eval(const FlatTopSpec& spec, double s) {
    require_flat_top(spec, "lambda");
    const double a = std::abs(s);
    const double c = spec.c;
    if (a <= c) return 1.0;
    switch (spec.family) {
        case KernelFamily::Trapezoid:
            return a < 1.0 ? (a - 1.0) / (c - 1.0) : 0.0;
        case KernelFamily::InfinitelyDifferentiable: {
            if (a >= 1.0) return 0.0;
            const double b = spec.b;
            const double dc = a - c;
            const double d1 = a - 1.0;
            return std::exp(-b * std::exp(-b / (dc * dc)) / (d1 * d1));
        }
        case KernelFamily::FlatTopParzen: {
            const double t = a - c;
            if (t <= 0.5) return 1.0 - 6.0 * t * t + 6.0 * t * t * t;
            if (t <= 1.0) {
                const double r = 1.0 - t;
                return 2.0 * r * r * r;
            }
            return 0.0;
        }
        case KernelFamily::EpanechnikovBaseline:
            break;
    }
    return 0.0;
}

double capital_lambda(const FlatTopSpec& spec, double x) {
    require_flat_top(spec, "Lambda");
    const double ax = std::abs(x);
    auto integrand = [&](double s) { return lambda_eval(spec, s) * std::cos(s * ax); };
    // Breakpoints where lambda loses smoothness.
    double breaks[4] = {0.0, spec.c, spec.support_radius(), spec.support_radius()};
    int pieces = 2;
    if (spec.family == KernelFamily::FlatTopParzen) {
        breaks[2] = spec.c + 0.5;
        breaks[3] = spec.c + 1.0;
        pieces = 3;
    }
    double total = 0.0;
    for (int p = 0; p < pieces; ++p) {
        const double lo = breaks[p];
        const double hi = breaks[p + 1];
        const int panels = std::max(8, static_cast<int>(std::ceil((hi - lo) * ax / 4.0)) + 1);
        total += composite_gauss(integrand, lo, hi, panels);
    }
    return total / M_PI;
}

double capital_lambda_trapezoid_closed_form(double c, double x) {
    if (std::abs(x) < 1e-6) {
        // Taylor expansion around zero.
        return (1.0 + c) / (2.0 * M_PI) - x * x * (1.0 + c) * (1.0 + c * c) / (24.0 * M_PI);
    }
    return (std::cos(c * x) - std::cos(x)) / (M_PI * (1.0 - c) * x * x);
}

void check_bandwidth(double bandwidth) {
    if (!(bandwidth > 0.0 && bandwidth <= 1.0)) {
        throw DomainError("bandwidth must lie in (0, 1], got " + std::to_string(bandwidth));
    }
}

double weight_function(const FlatTopSpec& spec, double bandwidth, double x) {
    require_flat_top(spec, "weight_function");
    check_bandwidth(bandwidth);
    const auto lags = static_cast<long>(std::ceil(spec.support_radius() / bandwidth));
    double sum = 1.0;
    for (long u = 1; u <= lags; ++u) {
        const double l = lambda_eval(spec, bandwidth * static_cast<double>(u));
        if (l != 0.0) sum += 2.0 * l * std::cos(x * static_cast<double>(u));
    }
    return sum / (2.0 * M_PI);
}

double baseline_weight(double bandwidth, double x) {
    check_bandwidth(bandwidth);
    const double two_pi = 2.0 * M_PI;
    const double j0 = std::round(-x / two_pi);
    double sum = 0.0;
    for (int dj = -1; dj <= 1; ++dj) {
        const double y = (x + two_pi * (j0 + dj)) / bandwidth;
        if (std::abs(y) < 1.0) sum += 0.75 * (1.0 - y * y) / bandwidth;
    }
    return sum;
}

double smoothing_weight(const FlatTopSpec& spec, double bandwidth, double x) {
    return spec.is_flat_top() ? weight_function(spec, bandwidth, x) : baseline_weight(bandwidth, x);
}

double effective_flat_top_radius(const FlatTopSpec& spec) {
    require_flat_top(spec, "effective flat-top radius");
    const double target = 1.0 - spec.epsilon_ef;
    double lo = spec.c;
    double hi = spec.support_radius();
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (lambda_eval(spec, mid) >= target) lo = mid;
        else hi = mid;
    }
    return lo;
}

double kernel_moment(const FlatTopSpec& spec, unsigned k, double truncation) {
    require_flat_top(spec, "kernel_moment");
    if (!(truncation > 0.0)) throw DomainError("moment truncation must be positive");
    // Folded onto [0, R]: Lambda is even, so odd powers cancel node by node.
    const int power = static_cast<int>(k);
    auto integrand = [&](double x) {
        return (std::pow(x, power) + std::pow(-x, power)) * capital_lambda(spec, x);
    };
    const int panels = std::max(16, static_cast<int>(std::ceil(truncation)));
    return composite_gauss(integrand, 0.0, truncation, panels);
}

}  // namespace ftspec
