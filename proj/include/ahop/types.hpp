#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace ahop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error taxonomy. The CLI maps these onto exit codes, everything else
// just propagates them.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
struct TrainingError : Error {
    using Error::Error;
};
struct InvariantViolation : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

/// d x N matrix of stored patterns, one pattern per column.
/// Immutable after construction; entries must be finite.
class MemoryMatrix {
public:
    explicit MemoryMatrix(Matrix data);

    int dim() const { return static_cast<int>(data_.rows()); }
    int count() const { return static_cast<int>(data_.cols()); }
    const Matrix& data() const { return data_; }
    /// Column k, 0-based.
    Eigen::Ref<const Vector> pattern(int k) const;

private:
    Matrix data_;
};

enum class SeparationKind { Softmax, Argmax };
enum class BaseKind { Dis, Dot };
enum class VariantKind { Noisy, Masked, Biased, Mixed };

const char* to_string(SeparationKind k);
const char* to_string(BaseKind k);
const char* to_string(VariantKind k);

struct MixedTriplet {
    double mask = 0.0;
    double noise = 0.0;
    double bias = 0.0;
};

class RngState;

/// Parameterization of a variant distribution over (origin pattern, query).
///
/// A Mixed spec freezes its sign vector (and the derived drift) at creation,
/// so every sample drawn from the same spec shares one bias direction.
struct VariantSpec {
    VariantKind kind = VariantKind::Noisy;
    Vector sigma;                       // per-dimension noise variances (Noisy)
    double p_masked = 0.0;              // per-dimension replacement probability (Masked)
    double mask_low = -1.0;
    double mask_high = 1.0;
    Vector drift;                       // constant additive bias (Biased, Mixed)
    MixedTriplet mixed_triplet;
    Vector sign_vector;                 // frozen {-1,+1}^d signs (Mixed)
    double match_tol = 1e-12;           // equality tolerance for delta comparisons

    static VariantSpec noisy(Vector sigma);
    static VariantSpec noisy_iso(double sigma, int d);
    static VariantSpec masked(double p, double lo = -1.0, double hi = 1.0);
    static VariantSpec biased(Vector drift);
    /// Freezes the sign vector using `rng`; drift_i = sign_i * triplet.bias.
    static VariantSpec mixed(MixedTriplet triplet, int d, RngState& rng);

    /// Throws ConfigError if the spec is not usable against dimensionality d.
    void validate(int d) const;
};

/// How the footprint aggregation matrix is realized for one base.
/// FixedTriangular is the lower-left all-ones triangle, applied as a
/// cumulative sum without materializing the matrix.
struct UMode {
    enum class Kind { FixedTriangular, Matrix };
    Kind kind = Kind::FixedTriangular;
    ahop::Matrix matrix;     // Matrix mode only, d x d
    bool trainable = false;  // Matrix mode only

    static UMode fixed_triangular() { return {}; }
    static UMode explicit_matrix(ahop::Matrix m, bool trainable_);
    bool is_triangular() const { return kind == Kind::FixedTriangular; }
};

struct BaseConfig {
    BaseKind base = BaseKind::Dis;
    Vector w;
    double beta = 1.0;
    bool sorted = true;  // footprint of sorted (descending) dimension-wise vector
    UMode u_mode;
};

/// Learnable parameters of the adaptive similarity: one (w, beta) per base
/// footprint, plus the footprint configuration flags.
struct WeightSet {
    std::vector<BaseConfig> bases;

    int dim() const;
    void validate(int d = -1) const;

    /// One Dis base with w = e_d, beta = 1: degenerates to -|xi - x|^2.
    static WeightSet base_dis(int d);
    /// Dis + Dot bases, each w = e_d, beta = 1 (degenerate-to-base init).
    static WeightSet base_dis_dot(int d);
};

struct Trajectory {
    std::vector<Vector> iterates;
    std::vector<double> energies;  // same length as iterates
    bool converged = false;
    int steps = 0;  // iterate count minus one
};

struct VariantSample {
    int origin = 0;  // 0-based column of the generating memory
    Vector query;
};

namespace detail {
void require_finite(const Vector& v, const char* what);
void require_finite(const Matrix& m, const char* what);
}  // namespace detail

}  // namespace ahop
