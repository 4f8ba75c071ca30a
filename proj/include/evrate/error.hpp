#pragma once

#include <stdexcept>
#include <string>

namespace evrate {

enum class Errc {
  out_of_range_event,
  negative_timestamp,
  empty_stream,
  invalid_roi,
  window_too_large,
  template_deeper_than_area,
  no_valid_windows,
  parse_error,
  bad_magic,
  truncated_file,
  count_mismatch,
  unsorted_input,
  invalid_spec,
  no_estimate,
  io_error,
};

/// Library error. `where()` carries an event index or line number when the
/// error is tied to one, -1 otherwise.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message, long long where = -1)
      : std::runtime_error(message), code_(code), where_(where) {}

  Errc code() const noexcept { return code_; }
  long long where() const noexcept { return where_; }

private:
  Errc code_;
  long long where_;
};

const char* errc_name(Errc code) noexcept;

}  // namespace evrate
