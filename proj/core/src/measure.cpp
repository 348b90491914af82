#include "peacock/measure.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "peacock/csv.hpp"
#include "peacock/quadrature.hpp"

namespace peacock {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}
}  // namespace

const std::vector<Atom>& MeasureImpl::atoms() const {
    static const std::vector<Atom> empty;
    return empty;
}

// ============================================================================
// Analytic families.
//
// Each family provides closed forms in its own coordinates; the shared
// wrapper folds in an affine map x -> scale*x + shift (scale > 0), under which
//   S(x) = S0((x-shift)/scale),   C(x) = scale * C0((x-shift)/scale).
// ============================================================================

namespace {

struct ExponentialF {
    double c;
    double survival(double x) const { return x <= 0.0 ? 1.0 : std::exp(-c * x); }
    double isf(double x) const {
        return x <= 0.0 ? 1.0 / c - x : std::exp(-c * x) / c;
    }
    double mean() const { return 1.0 / c; }
    double upper() const { return kInf; }
    double lower() const { return 0.0; }
    double quantile(double p) const { return -std::log1p(-p) / c; }
    double cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-c * x); }
    double pdf(double x) const { return x < 0.0 ? 0.0 : c * std::exp(-c * x); }
    std::string name() const { return "exp c=" + num(c); }
};

struct GaussianF {
    double sigma;
    boost::math::normal_distribution<double> nd{0.0, 1.0};
    double survival(double x) const {
        return boost::math::cdf(boost::math::complement(nd, x / sigma));
    }
    double isf(double x) const {
        double u = x / sigma;
        return sigma * boost::math::pdf(nd, u) -
               x * boost::math::cdf(boost::math::complement(nd, u));
    }
    double mean() const { return 0.0; }
    double upper() const { return kInf; }
    double lower() const { return -kInf; }
    double quantile(double p) const { return sigma * boost::math::quantile(nd, p); }
    double cdf(double x) const { return boost::math::cdf(nd, x / sigma); }
    double pdf(double x) const { return boost::math::pdf(nd, x / sigma) / sigma; }
    std::string name() const { return "gauss sigma=" + num(sigma); }
};

struct GammaF {
    double k, theta;
    boost::math::gamma_distribution<double> gd{1.0, 1.0};
    GammaF(double k_, double theta_) : k(k_), theta(theta_), gd(k_, theta_) {}
    double survival(double x) const {
        return x <= 0.0 ? 1.0 : boost::math::gamma_q(k, x / theta);
    }
    double isf(double x) const {
        if (x <= 0.0) return k * theta - x;
        // int_x^inf y f(y) dy = k*theta * Q(k+1, x/theta)
        return k * theta * boost::math::gamma_q(k + 1.0, x / theta) -
               x * boost::math::gamma_q(k, x / theta);
    }
    double mean() const { return k * theta; }
    double upper() const { return kInf; }
    double lower() const { return 0.0; }
    double quantile(double p) const { return boost::math::quantile(gd, p); }
    double cdf(double x) const { return x <= 0.0 ? 0.0 : boost::math::cdf(gd, x); }
    double pdf(double x) const { return x < 0.0 ? 0.0 : boost::math::pdf(gd, x); }
    std::string name() const { return "gamma k=" + num(k) + " theta=" + num(theta); }
};

struct UniformF {
    double a, b;
    double survival(double x) const {
        if (x <= a) return 1.0;
        if (x >= b) return 0.0;
        return (b - x) / (b - a);
    }
    double isf(double x) const {
        if (x <= a) return 0.5 * (a + b) - x;
        if (x >= b) return 0.0;
        return (b - x) * (b - x) / (2.0 * (b - a));
    }
    double mean() const { return 0.5 * (a + b); }
    double upper() const { return b; }
    double lower() const { return a; }
    double quantile(double p) const { return a + p * (b - a); }
    double cdf(double x) const {
        if (x <= a) return 0.0;
        if (x >= b) return 1.0;
        return (x - a) / (b - a);
    }
    double pdf(double x) const { return (x < a || x > b) ? 0.0 : 1.0 / (b - a); }
    std::string name() const { return "uniform a=" + num(a) + " b=" + num(b); }
};

struct LaplaceF {
    double c;
    double survival(double x) const {
        return x >= 0.0 ? 0.5 * std::exp(-c * x) : 1.0 - 0.5 * std::exp(c * x);
    }
    double isf(double x) const {
        return x >= 0.0 ? std::exp(-c * x) / (2.0 * c)
                        : -x + std::exp(c * x) / (2.0 * c);
    }
    double mean() const { return 0.0; }
    double upper() const { return kInf; }
    double lower() const { return -kInf; }
    double quantile(double p) const {
        return p < 0.5 ? std::log(2.0 * p) / c : -std::log(2.0 * (1.0 - p)) / c;
    }
    double cdf(double x) const {
        return x < 0.0 ? 0.5 * std::exp(c * x) : 1.0 - 0.5 * std::exp(-c * x);
    }
    double pdf(double x) const { return 0.5 * c * std::exp(-c * std::fabs(x)); }
    std::string name() const { return "laplace c=" + num(c); }
};

struct BetaF {
    double al, be;
    boost::math::beta_distribution<double> bd{1.0, 1.0};
    BetaF(double a_, double b_) : al(a_), be(b_), bd(a_, b_) {}
    double survival(double x) const {
        if (x <= 0.0) return 1.0;
        if (x >= 1.0) return 0.0;
        return boost::math::ibetac(al, be, x);
    }
    double isf(double x) const {
        if (x <= 0.0) return mean() - x;
        if (x >= 1.0) return 0.0;
        // int_x^1 y f(y) dy = mean * ibetac(al+1, be, x)
        return mean() * boost::math::ibetac(al + 1.0, be, x) -
               x * boost::math::ibetac(al, be, x);
    }
    double mean() const { return al / (al + be); }
    double upper() const { return 1.0; }
    double lower() const { return 0.0; }
    double quantile(double p) const { return boost::math::quantile(bd, p); }
    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return boost::math::ibeta(al, be, x);
    }
    double pdf(double x) const {
        return (x < 0.0 || x > 1.0) ? 0.0 : boost::math::pdf(bd, x);
    }
    std::string name() const { return "beta alpha=" + num(al) + " beta=" + num(be); }
};

struct StudentTF {
    double nu;
    boost::math::students_t_distribution<double> td{3.0};
    explicit StudentTF(double nu_) : nu(nu_), td(nu_) {}
    double survival(double x) const {
        return boost::math::cdf(boost::math::complement(td, x));
    }
    double isf(double x) const {
        // Partial moment: int_x^inf y f(y) dy = (nu + x^2) f(x) / (nu - 1).
        return (nu + x * x) * boost::math::pdf(td, x) / (nu - 1.0) -
               x * survival(x);
    }
    double mean() const { return 0.0; }
    double upper() const { return kInf; }
    double lower() const { return -kInf; }
    double quantile(double p) const { return boost::math::quantile(td, p); }
    double cdf(double x) const { return boost::math::cdf(td, x); }
    double pdf(double x) const { return boost::math::pdf(td, x); }
    std::string name() const { return "student nu=" + num(nu); }
};

struct LogNormalF {
    double sigma;
    boost::math::normal_distribution<double> nd{0.0, 1.0};
    double survival(double x) const {
        if (x <= 0.0) return 1.0;
        return boost::math::cdf(boost::math::complement(nd, std::log(x) / sigma));
    }
    double isf(double x) const {
        if (x <= 0.0) return mean() - x;
        // int_x^inf y f(y) dy = M1 * Phi(sigma - d) with d = ln(x)/sigma.
        double d = std::log(x) / sigma;
        return mean() * boost::math::cdf(nd, sigma - d) -
               x * boost::math::cdf(boost::math::complement(nd, d));
    }
    double mean() const { return std::exp(0.5 * sigma * sigma); }
    double upper() const { return kInf; }
    double lower() const { return 0.0; }
    double quantile(double p) const {
        if (p <= 0.0) return 0.0;
        return std::exp(sigma * boost::math::quantile(nd, p));
    }
    double cdf(double x) const {
        return x <= 0.0 ? 0.0 : boost::math::cdf(nd, std::log(x) / sigma);
    }
    double pdf(double x) const {
        return x <= 0.0 ? 0.0 : boost::math::pdf(nd, std::log(x) / sigma) / (x * sigma);
    }
    std::string name() const { return "lognormal sigma=" + num(sigma); }
};

template <class Family>
class AnalyticImpl : public MeasureImpl {
public:
    AnalyticImpl(Family fam, double scale, double shift)
        : fam_(std::move(fam)), a_(scale), b_(shift) {}

    MeasureKind kind() const override { return MeasureKind::Analytic; }
    double survival(double x) const override { return fam_.survival((x - b_) / a_); }
    double integrated_survival(double x) const override {
        return a_ * fam_.isf((x - b_) / a_);
    }
    double mean() const override { return a_ * fam_.mean() + b_; }
    double upper_support() const override {
        double u = fam_.upper();
        return std::isinf(u) ? u : a_ * u + b_;
    }
    double lower_support() const override {
        double l = fam_.lower();
        return std::isinf(l) ? l : a_ * l + b_;
    }
    double quantile(double p) const override { return a_ * fam_.quantile(p) + b_; }
    double cdf(double x) const override { return fam_.cdf((x - b_) / a_); }
    double pdf(double x) const override { return fam_.pdf((x - b_) / a_) / a_; }
    bool has_density() const override { return true; }
    std::string describe() const override {
        std::string s = "kind=" + fam_.name();
        if (a_ != 1.0) s += " scale=" + num(a_);
        if (b_ != 0.0) s += " shift=" + num(b_);
        return s;
    }

    std::shared_ptr<const MeasureImpl> folded_affine(double a, double b) const {
        return std::make_shared<AnalyticImpl<Family>>(fam_, a * a_, a * b_ + b);
    }

private:
    Family fam_;
    double a_, b_;
};

}  // namespace

// ============================================================================
// Finitely supported measures. Suffix sums make survival and integrated
// survival exact partial sums:
//   S(x) = sum_{a_i >= x} m_i,   C(x) = sum_{a_i >= x} m_i (a_i - x).
// ============================================================================

namespace {

class DiscreteImpl : public MeasureImpl {
public:
    DiscreteImpl(std::vector<Atom> atoms, MeasureKind tag) : tag_(tag) {
        if (atoms.empty()) throw ConfigError("discrete measure needs at least one atom");
        std::sort(atoms.begin(), atoms.end(),
                  [](const Atom& x, const Atom& y) { return x.position < y.position; });
        // merge duplicates, drop nonpositive masses
        for (const Atom& at : atoms) {
            if (!std::isfinite(at.position) || !std::isfinite(at.mass))
                throw ConfigError("non-finite atom");
            if (at.mass <= 0.0) continue;
            if (!atoms_.empty() && atoms_.back().position == at.position)
                atoms_.back().mass += at.mass;
            else
                atoms_.push_back(at);
        }
        if (atoms_.empty()) throw ConfigError("discrete measure has zero total mass");
        double total = 0.0;
        for (const Atom& at : atoms_) total += at.mass;
        if (!(total > 0.0)) throw ConfigError("discrete measure has zero total mass");
        for (Atom& at : atoms_) at.mass /= total;

        std::size_t n = atoms_.size();
        suffix_mass_.assign(n + 1, 0.0);
        suffix_moment_.assign(n + 1, 0.0);
        for (std::size_t i = n; i-- > 0;) {
            suffix_mass_[i] = suffix_mass_[i + 1] + atoms_[i].mass;
            suffix_moment_[i] = suffix_moment_[i + 1] + atoms_[i].mass * atoms_[i].position;
        }
        prefix_mass_.assign(n, 0.0);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += atoms_[i].mass;
            prefix_mass_[i] = acc;
        }
        prefix_mass_.back() = 1.0;
    }

    MeasureKind kind() const override { return tag_; }

    double survival(double x) const override { return suffix_mass_[first_at_or_above(x)]; }

    double integrated_survival(double x) const override {
        std::size_t i = first_at_or_above(x);
        return suffix_moment_[i] - x * suffix_mass_[i];
    }

    double mean() const override { return suffix_moment_[0]; }
    double upper_support() const override { return atoms_.back().position; }
    double lower_support() const override { return atoms_.front().position; }

    double quantile(double p) const override {
        if (p <= 0.0) return atoms_.front().position;
        std::size_t lo = 0, hi = atoms_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (prefix_mass_[mid] >= p)
                hi = mid;
            else
                lo = mid + 1;
        }
        return atoms_[lo].position;
    }

    double cdf(double x) const override {
        // last atom <= x, exact prefix sum
        std::size_t i = first_at_or_above(std::nextafter(x, kInf));
        return i == 0 ? 0.0 : prefix_mass_[i - 1];
    }

    bool purely_atomic() const override { return true; }
    const std::vector<Atom>& atoms() const override { return atoms_; }

    std::string describe() const override {
        std::string s = "kind=atomic atoms=";
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            s += (i ? "," : "") + num(atoms_[i].position);
        s += " masses=";
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            s += (i ? "," : "") + num(atoms_[i].mass);
        return s;
    }

    std::shared_ptr<const MeasureImpl> folded_affine(double a, double b) const {
        std::vector<Atom> moved(atoms_);
        for (Atom& at : moved) at.position = a * at.position + b;
        return std::make_shared<DiscreteImpl>(std::move(moved), tag_);
    }

private:
    std::size_t first_at_or_above(double x) const {
        std::size_t lo = 0, hi = atoms_.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (atoms_[mid].position >= x)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    std::vector<Atom> atoms_;
    std::vector<double> suffix_mass_, suffix_moment_, prefix_mass_;
    MeasureKind tag_;
};

// Generic affine wrapper for derived measures without a structural shortcut.
class AffineImpl : public MeasureImpl {
public:
    AffineImpl(std::shared_ptr<const MeasureImpl> base, double a, double b)
        : base_(std::move(base)), a_(a), b_(b) {
        for (const Atom& at : base_->atoms())
            atoms_.push_back({a_ * at.position + b_, at.mass});
    }

    double survival(double x) const override { return base_->survival((x - b_) / a_); }
    double integrated_survival(double x) const override {
        return a_ * base_->integrated_survival((x - b_) / a_);
    }
    double mean() const override { return a_ * base_->mean() + b_; }
    double upper_support() const override {
        double u = base_->upper_support();
        return std::isinf(u) ? u : a_ * u + b_;
    }
    double lower_support() const override {
        double l = base_->lower_support();
        return std::isinf(l) ? l : a_ * l + b_;
    }
    double quantile(double p) const override { return a_ * base_->quantile(p) + b_; }
    double cdf(double x) const override { return base_->cdf((x - b_) / a_); }
    double pdf(double x) const override { return base_->pdf((x - b_) / a_) / a_; }
    bool has_density() const override { return base_->has_density(); }
    double sample(RngStream& s) const override { return a_ * base_->sample(s) + b_; }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    bool purely_atomic() const override { return base_->purely_atomic(); }
    std::string describe() const override {
        return base_->describe() + " | affine scale=" + num(a_) + " shift=" + num(b_);
    }

private:
    std::shared_ptr<const MeasureImpl> base_;
    double a_, b_;
    std::vector<Atom> atoms_;
};

// Convex combination. Survival, integrated survival, cdf, and pdf are the
// weighted sums; the quantile falls back to bisection seeded by the extreme
// component quantiles.
class MixtureImpl : public MeasureImpl {
public:
    MixtureImpl(std::vector<double> weights, std::vector<Measure> parts)
        : w_(std::move(weights)), parts_(std::move(parts)) {
        if (parts_.empty() || w_.size() != parts_.size())
            throw ConfigError("mixture needs matching weights and components");
        double total = 0.0;
        for (double w : w_) {
            if (!std::isfinite(w) || w < 0.0)
                throw ConfigError("mixture weights must be finite and >= 0");
            total += w;
        }
        if (!(total > 0.0)) throw ConfigError("mixture has zero total weight");
        for (double& w : w_) w /= total;

        density_ = true;
        atomic_ = true;
        std::vector<Atom> merged;
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            density_ = density_ && parts_[k].has_density();
            atomic_ = atomic_ && parts_[k].purely_atomic();
            for (const Atom& at : parts_[k].atoms())
                if (w_[k] > 0.0) merged.push_back({at.position, w_[k] * at.mass});
        }
        std::sort(merged.begin(), merged.end(),
                  [](const Atom& x, const Atom& y) { return x.position < y.position; });
        for (const Atom& at : merged) {
            if (!atoms_.empty() && atoms_.back().position == at.position)
                atoms_.back().mass += at.mass;
            else
                atoms_.push_back(at);
        }
    }

    double survival(double x) const override { return weighted(&Measure::survival, x); }
    double integrated_survival(double x) const override {
        return weighted(&Measure::integrated_survival, x);
    }
    double cdf(double x) const override { return weighted(&Measure::cdf, x); }
    double mean() const override {
        double m = 0.0;
        for (std::size_t k = 0; k < parts_.size(); ++k) m += w_[k] * parts_[k].mean();
        return m;
    }
    double upper_support() const override {
        double u = -kInf;
        for (std::size_t k = 0; k < parts_.size(); ++k)
            if (w_[k] > 0.0) u = std::max(u, parts_[k].upper_support());
        return u;
    }
    double lower_support() const override {
        double l = kInf;
        for (std::size_t k = 0; k < parts_.size(); ++k)
            if (w_[k] > 0.0) l = std::min(l, parts_[k].lower_support());
        return l;
    }
    double quantile(double p) const override {
        if (p <= 0.0) return lower_support();
        if (p >= 1.0) return upper_support();
        double lo = kInf, hi = -kInf;
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            if (w_[k] == 0.0) continue;
            double q = parts_[k].quantile(p);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        return numeric_quantile(*this, p, lo, hi);
    }
    double pdf(double x) const override {
        if (!density_) throw Error("NoDensity", "measure has no density: " + describe());
        return weighted(&Measure::pdf, x);
    }
    bool has_density() const override { return density_; }
    double sample(RngStream& s) const override {
        double u = s.uniform01();
        double acc = 0.0;
        std::size_t pick = parts_.size() - 1;
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            acc += w_[k];
            if (u < acc) {
                pick = k;
                break;
            }
        }
        return parts_[pick].sample(s);
    }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    bool purely_atomic() const override { return atomic_; }
    std::string describe() const override {
        std::string s = "mixture of " + num(static_cast<double>(parts_.size())) + " parts";
        for (std::size_t k = 0; k < parts_.size(); ++k)
            s += " | w=" + num(w_[k]) + " " + parts_[k].describe();
        return s;
    }

private:
    double weighted(double (Measure::*f)(double) const, double x) const {
        double v = 0.0;
        for (std::size_t k = 0; k < parts_.size(); ++k)
            if (w_[k] > 0.0) v += w_[k] * (parts_[k].*f)(x);
        return v;
    }

    std::vector<double> w_;
    std::vector<Measure> parts_;
    std::vector<Atom> atoms_;
    bool density_ = false;
    bool atomic_ = false;
};

}  // namespace

// ============================================================================
// Measure front end.
// ============================================================================

Measure Measure::from_impl(std::shared_ptr<const MeasureImpl> impl) {
    if (!impl) throw ConfigError("null measure impl");
    return Measure(std::move(impl));
}

Measure Measure::exponential(double rate) {
    if (!(rate > 0.0)) throw ConfigError("exponential needs rate > 0");
    return from_impl(std::make_shared<AnalyticImpl<ExponentialF>>(ExponentialF{rate}, 1.0, 0.0));
}

Measure Measure::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("gaussian needs sigma > 0");
    return from_impl(std::make_shared<AnalyticImpl<GaussianF>>(GaussianF{sigma}, 1.0, 0.0));
}

Measure Measure::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw ConfigError("gamma needs k, theta > 0");
    return from_impl(std::make_shared<AnalyticImpl<GammaF>>(GammaF(shape, scale), 1.0, 0.0));
}

Measure Measure::uniform(double lo, double hi) {
    if (!(hi > lo)) throw ConfigError("uniform needs a < b");
    return from_impl(std::make_shared<AnalyticImpl<UniformF>>(UniformF{lo, hi}, 1.0, 0.0));
}

Measure Measure::laplace(double rate) {
    if (!(rate > 0.0)) throw ConfigError("laplace needs rate > 0");
    return from_impl(std::make_shared<AnalyticImpl<LaplaceF>>(LaplaceF{rate}, 1.0, 0.0));
}

Measure Measure::erlang(double rate, int n) {
    if (!(rate > 0.0) || n < 1) throw ConfigError("erlang needs rate > 0, n >= 1");
    return gamma(static_cast<double>(n), 1.0 / rate);
}

Measure Measure::beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("beta needs alpha, beta > 0");
    return from_impl(std::make_shared<AnalyticImpl<BetaF>>(BetaF(alpha, beta), 1.0, 0.0));
}

Measure Measure::student_t(double dof) {
    if (!(dof > 1.0)) throw ConfigError("student t needs nu > 1 for an integrable mean");
    return from_impl(std::make_shared<AnalyticImpl<StudentTF>>(StudentTF(dof), 1.0, 0.0));
}

Measure Measure::log_normal(double sigma, double scale) {
    if (!(sigma > 0.0) || !(scale > 0.0))
        throw ConfigError("log normal needs sigma > 0 and scale > 0");
    return from_impl(
        std::make_shared<AnalyticImpl<LogNormalF>>(LogNormalF{sigma}, scale, 0.0));
}

Measure Measure::mixture(std::vector<double> weights, std::vector<Measure> components) {
    if (components.size() == 1) return components.front();
    return from_impl(
        std::make_shared<MixtureImpl>(std::move(weights), std::move(components)));
}

Measure Measure::atomic(std::vector<Atom> atoms) {
    return from_impl(std::make_shared<DiscreteImpl>(std::move(atoms), MeasureKind::Atomic));
}

Measure Measure::two_point(double lo, double hi, double p_hi) {
    if (!(p_hi > 0.0) || !(p_hi < 1.0)) throw ConfigError("two_point needs 0 < p < 1");
    return atomic({{lo, 1.0 - p_hi}, {hi, p_hi}});
}

Measure Measure::dirac(double at) { return atomic({{at, 1.0}}); }

Measure Measure::grid(std::vector<double> xs, std::vector<double> weights) {
    if (xs.size() != weights.size()) throw ConfigError("grid: size mismatch");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw ConfigError("grid: support must be strictly increasing");
    std::vector<Atom> atoms(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) atoms[i] = {xs[i], weights[i]};
    return from_impl(std::make_shared<DiscreteImpl>(std::move(atoms), MeasureKind::Grid));
}

Measure Measure::grid_from_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header.size() != 2 || t.header[0] != "x" || t.header[1] != "weight")
        throw ConfigError("grid csv must have header x,weight: " + path);
    std::vector<double> xs, ws;
    for (const auto& row : t.rows) {
        if (row.size() != 2) throw ConfigError("grid csv row width != 2: " + path);
        xs.push_back(std::stod(row[0]));
        ws.push_back(std::stod(row[1]));
    }
    return grid(std::move(xs), std::move(ws));
}

MeasureKind Measure::kind() const { return impl_->kind(); }
double Measure::survival(double x) const { return impl_->survival(x); }
double Measure::integrated_survival(double x) const { return impl_->integrated_survival(x); }
double Measure::mean() const { return impl_->mean(); }
double Measure::upper_support() const { return impl_->upper_support(); }
double Measure::lower_support() const { return impl_->lower_support(); }
double Measure::quantile(double p) const {
    if (!(p >= 0.0) || !(p <= 1.0)) throw ConfigError("quantile needs p in [0,1]");
    return impl_->quantile(p);
}
double Measure::cdf(double x) const { return impl_->cdf(x); }
double Measure::pdf(double x) const { return impl_->pdf(x); }
bool Measure::has_density() const { return impl_->has_density(); }
double Measure::sample(RngStream& stream) const { return impl_->sample(stream); }

std::vector<double> Measure::sample(std::size_t n, RngStream& stream) const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = impl_->sample(stream);
    return out;
}

const std::vector<Atom>& Measure::atoms() const { return impl_->atoms(); }
bool Measure::purely_atomic() const { return impl_->purely_atomic(); }
std::string Measure::describe() const { return impl_->describe(); }

Measure Measure::affine(double scale, double shift) const {
    if (!(scale >= 0.0) || !std::isfinite(scale) || !std::isfinite(shift))
        throw ConfigError("affine needs finite scale >= 0");
    if (scale == 0.0) return dirac(shift);
    if (scale == 1.0 && shift == 0.0) return *this;
    if (auto a = dynamic_cast<const DiscreteImpl*>(impl_.get()))
        return from_impl(a->folded_affine(scale, shift));
    if (auto e = dynamic_cast<const AnalyticImpl<ExponentialF>*>(impl_.get()))
        return from_impl(e->folded_affine(scale, shift));
    if (auto g = dynamic_cast<const AnalyticImpl<GaussianF>*>(impl_.get()))
        return from_impl(g->folded_affine(scale, shift));
    if (auto g = dynamic_cast<const AnalyticImpl<GammaF>*>(impl_.get()))
        return from_impl(g->folded_affine(scale, shift));
    if (auto u = dynamic_cast<const AnalyticImpl<UniformF>*>(impl_.get()))
        return from_impl(u->folded_affine(scale, shift));
    if (auto l = dynamic_cast<const AnalyticImpl<LaplaceF>*>(impl_.get()))
        return from_impl(l->folded_affine(scale, shift));
    if (auto b = dynamic_cast<const AnalyticImpl<BetaF>*>(impl_.get()))
        return from_impl(b->folded_affine(scale, shift));
    if (auto s = dynamic_cast<const AnalyticImpl<StudentTF>*>(impl_.get()))
        return from_impl(s->folded_affine(scale, shift));
    if (auto n = dynamic_cast<const AnalyticImpl<LogNormalF>*>(impl_.get()))
        return from_impl(n->folded_affine(scale, shift));
    return from_impl(std::make_shared<AffineImpl>(impl_, scale, shift));
}

Measure Measure::centered() const { return affine(1.0, -mean()); }

double numeric_quantile(const MeasureImpl& impl, double p, double bracket_lo,
                        double bracket_hi) {
    double lo = bracket_lo, hi = bracket_hi;
    double step = std::max(1.0, hi - lo);
    for (int i = 0; i < 200 && impl.cdf(lo) >= p && lo > -1e300; ++i) {
        lo -= step;
        step *= 2.0;
    }
    step = std::max(1.0, hi - lo);
    for (int i = 0; i < 200 && impl.cdf(hi) < p && hi < 1e300; ++i) {
        hi += step;
        step *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::fabs(lo) + std::fabs(hi)); ++i) {
        double mid = 0.5 * (lo + hi);
        if (impl.cdf(mid) >= p)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// ============================================================================
// Curves.
// ============================================================================

std::vector<double> quantile_span_grid(const Measure& mu, std::size_t points, double eps) {
    double lo = mu.quantile(eps);
    double hi = mu.quantile(1.0 - eps);
    if (!(hi > lo)) {
        double pad = std::max(1.0, std::fabs(lo));
        lo -= 0.5 * pad;
        hi += 0.5 * pad;
    }
    return linspace(lo, hi, points);
}

IsfCurve isf_curve(const Measure& mu, std::size_t points, double tail_eps) {
    IsfCurve c;
    c.xs = quantile_span_grid(mu, points, tail_eps);
    c.values.reserve(points);
    for (double x : c.xs) c.values.push_back(mu.integrated_survival(x));
    c.asymptote = mu.mean();
    return c;
}

Measure measure_from_isf(const IsfCurve& curve) {
    const auto& xs = curve.xs;
    const auto& cs = curve.values;
    if (xs.size() < 2 || xs.size() != cs.size())
        throw InvalidIsf("curve needs at least two samples");
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!std::isfinite(xs[i]) || !std::isfinite(cs[i]))
            throw InvalidIsf("non-finite curve sample");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw InvalidIsf("grid must be strictly increasing");

    double scale = std::max(std::fabs(curve.asymptote), cs.front());
    for (double v : cs) scale = std::max(scale, std::fabs(v));
    scale = std::max(scale, 1e-12);

    for (double v : cs)
        if (v < -1e-12 * scale) throw InvalidIsf("negative integrated survival");

    std::size_t n = xs.size();
    std::vector<double> slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        slope[i] = (cs[i + 1] - cs[i]) / (xs[i + 1] - xs[i]);
        if (slope[i] > 1e-9 || slope[i] < -1.0 - 1e-9)
            throw InvalidIsf("slope outside [-1, 0] at x=" + num(xs[i]));
    }
    for (std::size_t i = 0; i + 1 < n - 1; ++i)
        if (slope[i + 1] - slope[i] < -1e-10)
            throw InvalidIsf("convexity violated at x=" + num(xs[i + 1]));

    if (std::fabs(cs.front() + xs.front() - curve.asymptote) > 1e-8 * scale)
        throw InvalidIsf("left end does not meet the mean asymptote");
    if (cs.back() > 1e-8 * scale)
        throw InvalidIsf("right end does not vanish");

    // Second derivative of the piecewise-linear extension: slope breaks are the
    // atom masses (the extension has slope -1 left of the grid, 0 right of it).
    std::vector<Atom> atoms;
    auto push = [&atoms](double pos, double mass) {
        if (mass > 1e-15) atoms.push_back({pos, mass});
    };
    push(xs.front(), slope.front() + 1.0);
    for (std::size_t i = 1; i + 1 < n; ++i) push(xs[i], slope[i] - slope[i - 1]);
    push(xs.back(), -slope.back());
    if (atoms.empty())
        throw InvalidIsf("curve carries no mass");
    return Measure::from_impl(
        std::make_shared<DiscreteImpl>(std::move(atoms), MeasureKind::Grid));
}

// ============================================================================
// Measure config mini-language.
// ============================================================================

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("expected key=value, got '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

double want_num(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing key '" + key + "'");
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + it->second);
    }
}

std::vector<double> want_list(const std::map<std::string, std::string>& kv,
                              const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing key '" + key + "'");
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError("bad list entry for '" + key + "': " + cell);
        }
    }
    if (out.empty()) throw ConfigError("empty list for '" + key + "'");
    return out;
}

}  // namespace

Measure parse_measure_config(const std::string& text) {
    auto kv = parse_kv(text);
    auto it = kv.find("kind");
    if (it == kv.end()) throw ConfigError("measure config needs kind=...: " + text);
    const std::string& kind = it->second;

    Measure mu = Measure::dirac(0.0);
    if (kind == "exp") {
        mu = Measure::exponential(want_num(kv, "c"));
    } else if (kind == "gauss" || kind == "gaussian") {
        mu = Measure::gaussian(want_num(kv, "sigma"));
    } else if (kind == "gamma") {
        mu = Measure::gamma(want_num(kv, "k"), want_num(kv, "theta"));
    } else if (kind == "uniform") {
        mu = Measure::uniform(want_num(kv, "a"), want_num(kv, "b"));
    } else if (kind == "laplace") {
        mu = Measure::laplace(want_num(kv, "c"));
    } else if (kind == "erlang") {
        mu = Measure::erlang(want_num(kv, "c"), static_cast<int>(want_num(kv, "n")));
    } else if (kind == "beta") {
        mu = Measure::beta(want_num(kv, "alpha"), want_num(kv, "beta"));
    } else if (kind == "student") {
        mu = Measure::student_t(want_num(kv, "nu"));
    } else if (kind == "lognormal") {
        mu = Measure::log_normal(want_num(kv, "sigma"));
    } else if (kind == "atomic") {
        auto pos = want_list(kv, "atoms");
        auto mass = want_list(kv, "masses");
        if (pos.size() != mass.size())
            throw ConfigError("atoms/masses length mismatch: " + text);
        std::vector<Atom> atoms(pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i) atoms[i] = {pos[i], mass[i]};
        mu = Measure::atomic(std::move(atoms));
    } else if (kind == "grid") {
        auto f = kv.find("file");
        if (f == kv.end()) throw ConfigError("grid measure needs file=...: " + text);
        mu = Measure::grid_from_csv(f->second);
    } else if (kind == "dirac") {
        mu = Measure::dirac(want_num(kv, "at"));
    } else {
        throw ConfigError("unknown measure kind '" + kind + "'");
    }

    double scale = kv.count("scale") ? want_num(kv, "scale") : 1.0;
    double shift = kv.count("shift") ? want_num(kv, "shift") : 0.0;
    if (scale != 1.0 || shift != 0.0) mu = mu.affine(scale, shift);
    if (kv.count("center") && want_num(kv, "center") != 0.0) mu = mu.centered();
    return mu;
}

}  // namespace peacock
