#include "tdpod/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <sstream>

#include "tdpod/error.hpp"

namespace tdpod {

static_assert(std::endian::native == std::endian::little, "binary vector format assumes a little-endian host");

std::string fmt_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_io("cannot open for writing: " + path.string());
  return f;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail_io("cannot open for reading: " + path.string());
  return f;
}

void save_vector_binary(const Eigen::VectorXd& v, const std::filesystem::path& path) {
  std::ofstream f = open_output(path);
  const std::uint64_t n = static_cast<std::uint64_t>(v.size());
  f.write(kVectorMagic, sizeof(kVectorMagic));
  f.write(reinterpret_cast<const char*>(&n), sizeof(n));
  f.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!f) fail_io("write failed: " + path.string());
}

Eigen::VectorXd load_vector_binary(const std::filesystem::path& path) {
  std::ifstream f = open_input(path);
  char magic[8];
  std::uint64_t n = 0;
  f.read(magic, sizeof(magic));
  f.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!f || std::memcmp(magic, kVectorMagic, sizeof(magic)) != 0) fail_io("not a coefficient vector file: " + path.string());
  const auto payload = std::filesystem::file_size(path) - sizeof(magic) - sizeof(n);
  if (payload != n * sizeof(double)) fail_io("truncated coefficient vector file: " + path.string());
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!f) fail_io("read failed: " + path.string());
  return v;
}

void save_vector_csv(const Eigen::VectorXd& v, const std::filesystem::path& path) {
  CsvWriter w(path, {"dof", "value"});
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    w.cell(static_cast<long long>(i)).cell(v[i]);
    w.end_row();
  }
}

Eigen::VectorXd load_vector_csv(const std::filesystem::path& path) {
  const auto rows = read_csv_rows(path);
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2 || std::stoul(rows[i][0]) != i) fail_io("malformed vector CSV: " + path.string());
    v[static_cast<Eigen::Index>(i)] = std::stod(rows[i][1]);
  }
  return v;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream f = open_input(path);
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    fail_input("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream f = open_output(path);
  f << j.dump(2) << '\n';
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(open_output(path)) {
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (!first_) out_ << ',';
  out_ << s;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(fmt_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path,
                                                    std::vector<std::string>* header) {
  std::ifstream f = open_input(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (first) {
      if (header) *header = cells;
      first = false;
      continue;
    }
    rows.push_back(std::move(cells));
  }
  if (first) fail_io("empty CSV: " + path.string());
  return rows;
}

}  // namespace tdpod
