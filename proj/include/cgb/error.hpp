#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace cgb {

enum class Errc {
  // files and serialization
  missing_file,
  ragged_rows,
  non_numeric_cell,
  too_few_timesteps,
  serialization_error,
  schema_mismatch,
  missing_artifact,
  // datasets
  unstable_coupling,
  bad_dims,
  too_few_samples,
  single_class_dataset,
  // entropy estimation
  bad_bin_count,
  unnormalized_distribution,
  length_mismatch,
  series_too_short,
  // graphs
  negative_threshold,
  empty_graph,
  bad_fraction,
  // curvature and rewiring
  not_an_edge,
  candidate_already_edge,
  no_candidates,
  empty_candidates,
  // model
  shape_mismatch,
  indivisible_width,
  width_mismatch_without_projection,
  asymmetric_input,
  empty_split,
  single_class_split,
  diverged_to_nan,
  // configuration / CLI
  config_error,
  unknown_variant,
  empty_sweep,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

namespace detail {
template <class... Ts>
std::string cat(Ts&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}
}  // namespace detail

template <class... Ts>
[[noreturn]] void fail(Errc code, Ts&&... parts) {
  throw Error(code, detail::cat(std::forward<Ts>(parts)...));
}

template <class... Ts>
void require(bool cond, Errc code, Ts&&... parts) {
  if (!cond) fail(code, std::forward<Ts>(parts)...);
}

}  // namespace cgb
