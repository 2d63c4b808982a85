#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace sac::cli {

struct Context {
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;  // --seed beats SACLAB_SEED beats config
    int workers = 1;
    std::string format = "csv";  // csv | json
};

/// Dispatch one subcommand. Returns the process exit code:
/// 0 success, 2 validation failure, 3 numerical failure. Failures emit a
/// machine-readable JSON diagnostic on stderr (and error.json in out_dir).
int run(const std::string& command, const std::string& config_path, const Context& ctx);

/// The list of available subcommands.
const char* command_list();

}  // namespace sac::cli
