#pragma once

#include <cassert>
#include <stdexcept>
#include <vector>

namespace simkit {

/// Truncated Taylor polynomial of a time-dependent scalar:
///   c[0] + c[1] t + ... + c[deg] t^deg.
/// Arithmetic truncates at the common degree, which makes a Jet usable as
/// the scalar type of a vector field evaluated along the flow. Division
/// requires a nonzero constant term. Only rational operations are provided;
/// model right-hand sides composed of +, -, *, / work unchanged for double
/// and Jet arguments.
class Jet {
public:
    Jet() = default;
    explicit Jet(int degree, double constant_term = 0.0) : c_(static_cast<size_t>(degree) + 1, 0.0) {
        if (degree < 0) throw std::invalid_argument("Jet: negative degree");
        c_[0] = constant_term;
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    double& operator[](int k) { return c_[static_cast<size_t>(k)]; }
    double operator[](int k) const { return c_[static_cast<size_t>(k)]; }

    Jet& operator+=(const Jet& o) {
        check(o);
        for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        check(o);
        for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator+=(double s) {
        c_.at(0) += s;
        return *this;
    }
    Jet& operator-=(double s) {
        c_.at(0) -= s;
        return *this;
    }
    Jet& operator*=(double s) {
        for (double& x : c_) x *= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a -= s; }
    friend Jet operator-(double s, const Jet& a) {
        Jet r = -a;
        r += s;
        return r;
    }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

    Jet operator-() const {
        Jet r = *this;
        for (double& x : r.c_) x = -x;
        return r;
    }

    // Cauchy product, truncated.
    friend Jet operator*(const Jet& a, const Jet& b) {
        a.check(b);
        Jet r(a.degree());
        for (int k = 0; k <= a.degree(); ++k) {
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += a[j] * b[k - j];
            r[k] = s;
        }
        return r;
    }

    // Power-series division; b[0] must be nonzero.
    friend Jet operator/(const Jet& a, const Jet& b) {
        a.check(b);
        if (b[0] == 0.0) throw std::domain_error("Jet division by series with zero constant term");
        Jet q(a.degree());
        for (int k = 0; k <= a.degree(); ++k) {
            double s = a[k];
            for (int j = 1; j <= k; ++j) s -= b[j] * q[k - j];
            q[k] = s / b[0];
        }
        return q;
    }
    friend Jet operator/(double s, const Jet& b) {
        Jet num(b.degree(), s);
        return num / b;
    }

private:
    void check(const Jet& o) const {
        if (c_.size() != o.c_.size()) throw std::invalid_argument("Jet: mixed degrees");
    }
    std::vector<double> c_;
};

}  // namespace simkit
