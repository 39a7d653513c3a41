#include "core/types.hpp"

#include <string>

namespace groomsim {

void Environment::validate() const {
  auto require = [](std::uint32_t value, const char* name) {
    if (value < 1) {
      throw std::invalid_argument(std::string(name) + " must be >= 1 (got " +
                                  std::to_string(value) + ")");
    }
  };
  require(n_groomers, "n_groomers");
  require(n_groomees, "n_groomees");
  require(r_c, "r_c");
  require(r_g, "r_g");
  require(t_generations, "t_generations");
}

std::vector<std::uint32_t> RelationshipMatrix::column(std::size_t j) const {
  std::vector<std::uint32_t> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

}  // namespace groomsim
