#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace spreach {

/// Error categories. The CLI maps these onto process exit codes
/// (config -> 2, numeric -> 3), so library code should pick the
/// category that describes the root cause, not the call site.
enum class errc {
  domain,     // argument outside its documented range
  dimension,  // vector/matrix size mismatch
  config,     // malformed or inconsistent configuration
  numeric,    // divergence, non-finite values, no progress
  io          // file read/write failures
};

class Error : public std::runtime_error {
 public:
  Error(errc code, std::string what)
      : std::runtime_error(std::move(what)), code_(code) {}

  errc code() const noexcept { return code_; }

  static Error domain(std::string msg) { return {errc::domain, std::move(msg)}; }
  static Error dimension(std::string msg) { return {errc::dimension, std::move(msg)}; }
  static Error config(std::string msg) { return {errc::config, std::move(msg)}; }
  static Error numeric(std::string msg) { return {errc::numeric, std::move(msg)}; }
  static Error io(std::string msg) { return {errc::io, std::move(msg)}; }

 private:
  errc code_;
};

}  // namespace spreach
