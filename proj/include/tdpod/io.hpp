#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace tdpod {

using Json = nlohmann::json;

/// 17 significant digits, so CSV values round-trip exactly.
std::string fmt_double(double v);

std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

// Binary coefficient vectors: 8-byte magic "TDPODVEC", uint64 little-endian
// length, then that many IEEE-754 float64 values, little-endian.
inline constexpr char kVectorMagic[8] = {'T', 'D', 'P', 'O', 'D', 'V', 'E', 'C'};
void save_vector_binary(const Eigen::VectorXd& v, const std::filesystem::path& path);
Eigen::VectorXd load_vector_binary(const std::filesystem::path& path);

// CSV coefficient vectors: header "dof,value", one row per DOF.
void save_vector_csv(const Eigen::VectorXd& v, const std::filesystem::path& path);
Eigen::VectorXd load_vector_csv(const std::filesystem::path& path);

Json read_json(const std::filesystem::path& path);
void write_json(const Json& j, const std::filesystem::path& path);

/// Simple CSV table writer: header once, rows of preformatted cells.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(bool v) { return cell(std::string(v ? "1" : "0")); }
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

/// Reads a CSV with header; returns rows of string cells (header excluded).
std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path,
                                                    std::vector<std::string>* header = nullptr);

}  // namespace tdpod
