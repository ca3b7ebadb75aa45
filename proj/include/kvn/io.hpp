#ifndef KVN_IO_HPP
#define KVN_IO_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvn/fields.hpp"
#include "kvn/geometry.hpp"
#include "kvn/propagators.hpp"
#include "kvn/semiflow.hpp"
#include "kvn/sparse_operator.hpp"

namespace kvn {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
/// Readers never observe a partially written file.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

inline constexpr std::uint32_t kSeriesVersion = 1;

/// Snapshot series: "KVNF", version u32, N u64, d u32, count u32, then per
/// snapshot the time (f64) and N interleaved (re, im) f64 pairs. Little-endian.
std::string encode_series(const Propagation& prop, std::size_t n, int dim);

struct SeriesFile {
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  std::uint32_t dim = 0;
  std::vector<double> times;
  std::vector<ComplexField> states;
};

SeriesFile decode_series(const std::string& bytes);

/// step,t,norm,norm_drift
std::string norm_csv(const Propagation& prop);
/// face,x_1..x_d,normal_flux,class
std::string classification_csv(const Grid& grid, const BoundaryClassification& cls);
/// t,x_1..x_d,div_integral
std::string trajectory_csv(const Trajectory& tr, int dim);

std::string read_file(const std::filesystem::path& path);

}  // namespace kvn

#endif  // KVN_IO_HPP
