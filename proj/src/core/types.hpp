#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace groomsim {

// Raised when an argument lies outside the mathematical domain of an
// operation (all-zero strength row, d outside [0,1], NaN input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when reading or writing persisted results fails.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A groomer's heritable strategy: kernel shape s and stranger-grooming rate q.
struct Strategy {
  double s = 0.0;
  double q = 0.0;

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

// Which groomees the partner-selection kernel is normalized over.
// AllGroomees sums over every groomee, strangers entering at d = 0;
// ExistingPartners restricts the sum to groomees with w > 0.
enum class KernelScope { AllGroomees, ExistingPartners };

// Parameters of one simulation. Defaults are the reference values
// N = 100, R_g = 300, T = 200; M and R_c have no default in the model and
// are set to 1 only so that a default-constructed value is valid.
struct Environment {
  std::uint32_t n_groomers = 100;     // N
  std::uint32_t n_groomees = 1;       // M
  std::uint32_t r_c = 1;              // cooperation slots per groomee
  std::uint32_t r_g = 300;            // grooming actions per groomer per generation
  std::uint32_t t_generations = 200;  // T
  KernelScope kernel_scope = KernelScope::AllGroomees;

  // Throws std::invalid_argument naming the first field below 1.
  void validate() const;

  friend bool operator==(const Environment&, const Environment&) = default;
};

// N x M grooming counts, row-major. w(i, j) is the number of grooming events
// from groomer i to groomee j during the current generation.
class RelationshipMatrix {
 public:
  RelationshipMatrix() = default;
  RelationshipMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::uint32_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::uint32_t operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<std::uint32_t> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const std::uint32_t> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<std::uint32_t> column(std::size_t j) const;

  std::span<const std::uint32_t> values() const { return data_; }

  friend bool operator==(const RelationshipMatrix&, const RelationshipMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint32_t> data_;
};

// Cooperation received by each groomer in one generation.
using FitnessVector = std::vector<std::uint32_t>;

using Population = std::vector<Strategy>;

}  // namespace groomsim
