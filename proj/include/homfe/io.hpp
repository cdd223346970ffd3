#ifndef HOMFE_IO_HPP
#define HOMFE_IO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "homfe/common.hpp"

namespace homfe {

/**
 * Field dumps are flat little-endian float64 binaries (`<name>.f64`) with a
 * JSON text sidecar (`<name>.meta.json`) recording dtype, shape, layout,
 * component order and units, sufficient for lossless reload from any
 * analysis environment.
 */
struct FieldMeta {
  std::vector<Index> shape;      ///< logical shape, e.g. {quads, components}
  std::string layout;            ///< "node-planar" or "quad-interleaved"
  std::string component_order;   ///< human-readable component naming
  std::string units;
};

void write_field(const std::filesystem::path& base,
                 const Eigen::VectorXd& data, const FieldMeta& meta);

struct FieldDump {
  Eigen::VectorXd data;
  FieldMeta meta;
};

FieldDump read_field(const std::filesystem::path& base);

/// Headerless row-major uint8 phase maps.
std::vector<std::uint8_t> read_phase_map(const std::filesystem::path& path,
                                         Index expected);
void write_phase_map(const std::filesystem::path& path,
                     const std::vector<std::uint8_t>& phases);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Minimal CSV writer; every row must match the header width.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path, std::vector<std::string>* header);

}  // namespace homfe

#endif
