#include "schatten/scalar_symbol.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "schatten/errors.hpp"

namespace schatten {

namespace {

// p(p-1)...(p-k+1)
double falling_factorial(double p, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= (p - i);
    return r;
}

std::string number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

} // namespace

ScalarSymbol::ScalarSymbol(std::string name, int max_order, Derivatives derivatives, Domain domain)
    : name_(std::move(name)), max_order_(max_order), derivatives_(std::move(derivatives)),
      domain_(std::move(domain)) {
    if (max_order_ < 0) throw Error(ErrorKind::InvalidArgument, "max_order must be >= 0");
    if (!derivatives_) throw Error(ErrorKind::InvalidArgument, "symbol needs an evaluator");
}

bool ScalarSymbol::in_domain(double x) const {
    if (!std::isfinite(x)) return false;
    return !domain_ || domain_(x);
}

double ScalarSymbol::eval(int order, double x) const {
    if (order < 0 || order > max_order_) {
        throw Error(ErrorKind::OrderTooLow, name_ + " provides derivatives up to order " +
                                                std::to_string(max_order_) + ", need " +
                                                std::to_string(order));
    }
    if (!in_domain(x)) {
        throw Error(ErrorKind::DomainError, name_ + " is undefined at x = " + number(x));
    }
    return derivatives_(order, x);
}

ScalarSymbol ScalarSymbol::power(int degree) {
    if (degree < 0) throw Error(ErrorKind::InvalidArgument, "power degree must be >= 0");
    return ScalarSymbol("x^" + std::to_string(degree), 64, [degree](int k, double x) {
        if (k > degree) return 0.0;
        return falling_factorial(degree, k) * std::pow(x, degree - k);
    });
}

ScalarSymbol ScalarSymbol::exponential(int max_order) {
    return ScalarSymbol("exp", max_order, [](int, double x) { return std::exp(x); });
}

ScalarSymbol ScalarSymbol::abs_power(double p, double eps, int max_order) {
    if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "abs_power needs p > 0");
    if (eps < 0.0) throw Error(ErrorKind::InvalidArgument, "abs_power needs eps >= 0");
    return ScalarSymbol(
        "|x|^" + number(p), max_order,
        [p](int k, double x) {
            if (x == 0.0 && p - k < 0.0) throw Error(ErrorKind::DomainError, "|x|^p derivative at 0");
            const double sign_k = (x < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
            return falling_factorial(p, k) * std::pow(std::abs(x), p - k) * sign_k;
        },
        [eps](double x) { return std::abs(x) >= eps; });
}

ScalarSymbol ScalarSymbol::signed_abs_power(double p, double eps, int max_order) {
    if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "signed_abs_power needs p > 0");
    // d^k/dx^k |x|^{p-1} sign(x) = (p-1)...(p-k) |x|^{p-1-k} sign(x)^{k+1}
    return ScalarSymbol(
        "|x|^" + number(p - 1.0) + "sgn(x)", max_order,
        [p](int k, double x) {
            if (x == 0.0 && p - 1.0 - k < 0.0) {
                throw Error(ErrorKind::DomainError, "|x|^{p-1}sgn(x) singular at 0");
            }
            const double sign = (x < 0.0 && (k % 2 == 0)) ? -1.0 : 1.0;
            return falling_factorial(p - 1.0, k) * std::pow(std::abs(x), p - 1.0 - k) * sign;
        },
        [eps](double x) { return std::abs(x) >= eps; });
}

ScalarSymbol ScalarSymbol::from_function(std::string name, std::function<double(double)> f,
                                         Domain domain) {
    return ScalarSymbol(
        std::move(name), 0, [f = std::move(f)](int, double x) { return f(x); }, std::move(domain));
}

} // namespace schatten
