#ifndef BOLTZKIT_COMMON_HPP
#define BOLTZKIT_COMMON_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace boltz {

inline constexpr double kPi = 3.14159265358979323846264338328;

// ---------------------------------------------------------------------------
// Small 3-vector used for velocities and unit directions.
// ---------------------------------------------------------------------------
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return s * a; }
inline Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

// <v> = (1+|v|^2)^(1/2)
inline double vweight(const Vec3& v) { return std::sqrt(1.0 + norm2(v)); }
inline double vweight_r2(double r2) { return std::sqrt(1.0 + r2); }

// Completes {kappa, e1, e2} to a right-handed orthonormal frame.
inline void orthonormal_frame(const Vec3& kappa, Vec3& e1, Vec3& e2) {
    const Vec3 trial = std::abs(kappa.x) < 0.6 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    e1 = trial - dot(trial, kappa) * kappa;
    e1 = e1 / norm(e1);
    e2 = cross(kappa, e1);
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string& what, double achieved_tol)
        : std::runtime_error(what), achieved_tol_(achieved_tol) {}
    double achieved_tol() const { return achieved_tol_; }

  private:
    double achieved_tol_;
};

// ---------------------------------------------------------------------------
// Deterministic random numbers.  We roll our own so that sampled families are
// bit-identical across standard library implementations.
// ---------------------------------------------------------------------------
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    Vec3 uniform_vec(double a, double b) { return {uniform(a, b), uniform(a, b), uniform(a, b)}; }

    Vec3 unit_vec() {
        // Marsaglia rejection
        while (true) {
            const double a = uniform(-1.0, 1.0), b = uniform(-1.0, 1.0);
            const double s = a * a + b * b;
            if (s >= 1.0 || s == 0.0) continue;
            const double t = 2.0 * std::sqrt(1.0 - s);
            return {a * t, b * t, 1.0 - 2.0 * s};
        }
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Threading.  Work is split into fixed chunks so every reduction is summed in
// index order; results do not depend on the number of worker threads.
// ---------------------------------------------------------------------------
int max_threads();
void set_max_threads(int n);  // n = 0 means all hardware threads

// fn(begin, end) over [0, n) split into contiguous ranges.
void parallel_for_ranges(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

// Deterministic parallel reduction: term(i) summed in index order.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term);

// ---------------------------------------------------------------------------
// FNV-1a, used for config digests in reports.
// ---------------------------------------------------------------------------
inline std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex_digest(std::uint64_t h);

}  // namespace boltz

#endif
