#pragma once

#include <functional>
#include <string>

namespace schatten {

/// A real function of one variable together with closed-form derivatives
/// up to `max_order`, defined on an explicit domain.
///
/// eval(k, x) returns the k-th derivative at x. Evaluation outside the
/// domain throws DomainError; asking for k > max_order throws OrderTooLow.
class ScalarSymbol {
public:
    using Derivatives = std::function<double(int order, double x)>;
    using Domain = std::function<bool(double x)>;

    ScalarSymbol(std::string name, int max_order, Derivatives derivatives, Domain domain = {});

    const std::string& name() const noexcept { return name_; }
    int max_order() const noexcept { return max_order_; }

    bool in_domain(double x) const;
    double eval(int order, double x) const;
    double operator()(double x) const { return eval(0, x); }

    /// x -> x^degree (entire; derivatives of all orders available).
    static ScalarSymbol power(int degree);
    static ScalarSymbol identity() { return power(1); }
    static ScalarSymbol exponential(int max_order = 8);
    /// x -> |x|^p restricted to |x| >= eps. Derivatives:
    /// p(p-1)...(p-k+1) |x|^{p-k} sign(x)^k.
    static ScalarSymbol abs_power(double p, double eps, int max_order = 8);
    /// x -> |x|^{p-1} sign(x), the derivative of |x|^p divided by p.
    static ScalarSymbol signed_abs_power(double p, double eps, int max_order = 7);
    /// Wraps a plain function; only order 0 is available.
    static ScalarSymbol from_function(std::string name, std::function<double(double)> f,
                                      Domain domain = {});

private:
    std::string name_;
    int max_order_;
    Derivatives derivatives_;
    Domain domain_;
};

} // namespace schatten
