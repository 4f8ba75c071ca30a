#pragma once

#include <filesystem>
#include <optional>

#include "evrate/events.hpp"

namespace evrate {

enum class FileFormat { auto_detect, text, binary };

/// Text format: one event per line, "t_us,x,y,p" with p in {0, 1}; an
/// optional "t,x,y,p" header line is detected and skipped. Sensor geometry
/// is inferred as max coordinate + 1 unless overridden.
/// Throws Error{parse_error} with the 1-based line number, plus whatever
/// validate_stream raises.
EventStream read_text(const std::filesystem::path& path,
                      std::optional<uint16_t> width = std::nullopt,
                      std::optional<uint16_t> height = std::nullopt);

void write_text(const EventStream& stream, const std::filesystem::path& path);

/// Binary format "EVS1" (the trailing digit is the format version):
///   header, 24 bytes, little-endian:
///     magic "EVS1" | width u16 | height u16 | event_count u64 | duration_us u64
///   records, 16 bytes each:
///     t u64 | x u16 | y u16 | p u8 (0/1) | 3 zero pad bytes
/// write(read(f)) reproduces f byte for byte for well-formed files.
void write_binary(const EventStream& stream, const std::filesystem::path& path);

/// Throws Error{bad_magic}, Error{truncated_file} when the payload is
/// shorter than the declared count, Error{count_mismatch} when it is longer
/// or the header duration contradicts the records. Out-of-order records are
/// re-sorted with a warning unless strict_order is set, which raises
/// Error{unsorted_input} instead.
EventStream read_binary(const std::filesystem::path& path, bool strict_order = false);

/// Sniffs the EVS1 magic to pick the reader when format is auto_detect.
EventStream read_events(const std::filesystem::path& path,
                        FileFormat format = FileFormat::auto_detect,
                        std::optional<uint16_t> width = std::nullopt,
                        std::optional<uint16_t> height = std::nullopt, bool strict_order = false);

void write_events(const EventStream& stream, const std::filesystem::path& path,
                  FileFormat format = FileFormat::binary);

}  // namespace evrate
