#include "volterra_cli/run_context.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "volterra/ensemble_io.hpp"
#include "volterra/version.hpp"

namespace volterra::cli {

std::string sha256_hex(std::string_view bytes) {
  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> md(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!md || EVP_DigestInit_ex(md.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(md.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(md.get(), digest, &length) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable::Row& CsvTable::Row::operator<<(double v) {
  cells_.push_back(format_double(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(std::size_t v) {
  cells_.push_back(std::to_string(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(std::string_view v) {
  cells_.emplace_back(v);
  return *this;
}

CsvTable::Row::~Row() { table_.rows_.push_back(std::move(cells_)); }

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

void RunContext::add_artifact(const std::string& file, std::string content) {
  for (auto& [name, body] : artifacts_)
    if (name == file) {
      body = std::move(content);
      return;
    }
  artifacts_.emplace_back(file, std::move(content));
}

bool RunContext::check_at_most(const std::string& name, double observed, double bound) {
  const bool ok = observed <= bound;
  thresholds_.push_back({name, observed, "<=", bound, ok});
  return ok;
}

bool RunContext::check_at_least(const std::string& name, double observed, double bound) {
  const bool ok = observed >= bound;
  thresholds_.push_back({name, observed, ">=", bound, ok});
  return ok;
}

bool RunContext::passed() const noexcept {
  for (const auto& t : thresholds_)
    if (!t.passed) return false;
  return true;
}

namespace {

void write_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

}  // namespace

std::vector<std::filesystem::path> RunContext::write(const std::filesystem::path& dir, const ManifestInput& in) const {
  std::filesystem::create_directories(dir);

  nlohmann::json report = {{"command", command_}, {"scenario", in.scenario_name}, {"seed", seed_},
                           {"passed", passed()}, {"results", report_}};
  auto& checks = report["thresholds"] = nlohmann::json::array();
  for (const auto& t : thresholds_)
    checks.push_back({{"name", t.name}, {"observed", t.observed}, {"relation", t.relation}, {"bound", t.bound},
                      {"passed", t.passed}});

  std::vector<std::pair<std::string, std::string>> files = artifacts_;
  files.emplace_back("report.json", report.dump(2) + "\n");

  nlohmann::json manifest = {{"scenario", in.scenario_name},
                             {"command", command_},
                             {"config", in.config_path.string()},
                             {"config_sha256", sha256_hex(in.config_text)},
                             {"seed", seed_},
                             {"threads", in.threads},
                             {"library_version", library_version()},
                             {"passed", passed()}};
  auto& versions = manifest["versions"] = nlohmann::json::object();
  for (const auto& [name, version] : build_versions()) versions[name] = version;
  auto& outputs = manifest["outputs"] = nlohmann::json::array();

  std::vector<std::filesystem::path> written;
  for (const auto& [name, body] : files) {
    const auto path = dir / name;
    write_file(path, body);
    outputs.push_back({{"file", name}, {"sha256", sha256_hex(body)}, {"bytes", body.size()}});
    written.push_back(path);
  }
  const auto manifest_path = dir / "manifest.json";
  write_file(manifest_path, manifest.dump(2) + "\n");
  written.push_back(manifest_path);
  return written;
}

}  // namespace volterra::cli
