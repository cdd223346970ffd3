#include "homfe/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace homfe {

using nlohmann::json;

void write_field(const std::filesystem::path& base,
                 const Eigen::VectorXd& data, const FieldMeta& meta) {
  const std::filesystem::path bin = base.string() + ".f64";
  std::ofstream out(bin, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write '" + bin.string() + "'");
  }
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(sizeof(double)) * data.size());

  json side;
  side["dtype"] = "float64";
  side["byte_order"] = "little";
  side["count"] = data.size();
  side["shape"] = meta.shape;
  side["layout"] = meta.layout;
  side["component_order"] = meta.component_order;
  side["units"] = meta.units;
  std::ofstream sidecar(base.string() + ".meta.json");
  sidecar << side.dump(2) << "\n";
}

FieldDump read_field(const std::filesystem::path& base) {
  std::ifstream sidecar(base.string() + ".meta.json");
  if (!sidecar) {
    throw ValidationError("cannot open '" + base.string() + ".meta.json'");
  }
  json side = json::parse(sidecar);

  FieldDump dump;
  for (const auto& v : side.at("shape")) {
    dump.meta.shape.push_back(v.get<Index>());
  }
  dump.meta.layout = side.value("layout", "");
  dump.meta.component_order = side.value("component_order", "");
  dump.meta.units = side.value("units", "");

  const Index count = side.at("count").get<Index>();
  dump.data.resize(count);
  std::ifstream bin(base.string() + ".f64", std::ios::binary);
  if (!bin) {
    throw ValidationError("cannot open '" + base.string() + ".f64'");
  }
  bin.read(reinterpret_cast<char*>(dump.data.data()),
           static_cast<std::streamsize>(sizeof(double)) * count);
  if (bin.gcount() != static_cast<std::streamsize>(sizeof(double)) * count) {
    throw ValidationError("field dump '" + base.string() + ".f64' truncated");
  }
  return dump;
}

std::vector<std::uint8_t> read_phase_map(const std::filesystem::path& path,
                                         Index expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("microstructure.path: cannot open '" +
                          path.string() + "'");
  }
  std::vector<std::uint8_t> phases(static_cast<std::size_t>(expected));
  in.read(reinterpret_cast<char*>(phases.data()),
          static_cast<std::streamsize>(expected));
  if (in.gcount() != static_cast<std::streamsize>(expected)) {
    throw ValidationError("microstructure.path: expected " +
                          std::to_string(expected) + " bytes in '" +
                          path.string() + "'");
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw ValidationError("microstructure.path: '" + path.string() +
                          "' is larger than the declared grid");
  }
  return phases;
}

void write_phase_map(const std::filesystem::path& path,
                     const std::vector<std::uint8_t>& phases) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write '" + path.string() + "'");
  }
  out.write(reinterpret_cast<const char*>(phases.data()),
            static_cast<std::streamsize>(phases.size()));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write '" + path.string() + "'");
  }
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 == row.size() ? "\n" : ",");
    }
  };
  emit(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw ValidationError("csv row width does not match header");
    }
    emit(row);
  }
}

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open '" + path.string() + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      if (header) *header = cells;
      first = false;
    } else {
      rows.push_back(std::move(cells));
    }
  }
  return rows;
}

}  // namespace homfe
