#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace osgap {

enum class Command { Check, Certify, Sample, Report, Dump };
enum class OutputFormat { Json, Csv, Text };

std::string to_string(Command c);
std::string to_string(OutputFormat f);

struct RunConfig {
  Command command = Command::Check;
  std::vector<int> n_list;
  int samples = 100;
  std::uint64_t seed = 0;
  int local_dim = 0;  // 0 means n
  std::string output_path;  // empty writes to the given stream
  OutputFormat format = OutputFormat::Json;
  std::string dump_object;  // eta, p, beta, q, strategy
  std::string replay_path;  // sample: evaluate a dumped strategy instead of sampling
};

namespace exit_code {
inline constexpr int kPass = 0;
inline constexpr int kFailedCheck = 1;
inline constexpr int kUsage = 2;
}  // namespace exit_code

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws UsageError on invalid combinations.
void validate(const RunConfig& config);

/// Runs one command. Output goes to config.output_path (atomically) or to out.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs; returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes content to path via a sibling temp file and rename.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace osgap
