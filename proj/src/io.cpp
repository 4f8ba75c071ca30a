#include "evrate/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <string_view>

namespace evrate {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'V', 'S', '1'};
constexpr size_t kHeaderBytes = 24;
constexpr size_t kRecordBytes = 16;

template <typename T>
void put_le(std::string& out, T value) {
  for (size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const unsigned char* p) {
  T value = 0;
  for (size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(p[i]) << (8 * i);
  return value;
}

// Strict base-10 integer field; rejects trailing garbage.
bool parse_int(std::string_view field, int64_t& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

EventStream read_text(const std::filesystem::path& path, std::optional<uint16_t> width,
                      std::optional<uint16_t> height) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());

  std::vector<Event> events;
  int64_t max_x = -1, max_y = -1;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (line_no == 1 && view.find_first_not_of("txyp, \t") == std::string_view::npos) {
      continue;  // "t,x,y,p" header
    }
    std::array<int64_t, 4> fields{};
    size_t start = 0;
    bool ok = true;
    for (int f = 0; f < 4 && ok; ++f) {
      const size_t comma = view.find(',', start);
      if ((f < 3) != (comma != std::string_view::npos)) {
        ok = false;
        break;
      }
      const std::string_view field =
          trim(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start));
      ok = parse_int(field, fields[f]);
      start = comma + 1;
    }
    if (!ok || fields[1] < 0 || fields[1] > UINT16_MAX || fields[2] < 0 ||
        fields[2] > UINT16_MAX || (fields[3] != 0 && fields[3] != 1)) {
      throw Error(Errc::parse_error, path.string() + ":" + std::to_string(line_no) +
                      ": expected \"t,x,y,p\" with p in {0,1}", line_no);
    }
    events.push_back({fields[0], static_cast<uint16_t>(fields[1]),
                      static_cast<uint16_t>(fields[2]), fields[3] == 1});
    max_x = std::max(max_x, fields[1]);
    max_y = std::max(max_y, fields[2]);
  }
  const uint16_t w = width.value_or(static_cast<uint16_t>(max_x + 1));
  const uint16_t h = height.value_or(static_cast<uint16_t>(max_y + 1));
  return validate_stream(std::move(events), w, h);
}

void write_text(const EventStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << "t,x,y,p\n";
  for (const Event& e : stream.events) {
    out << e.t << ',' << e.x << ',' << e.y << ',' << (e.polarity ? 1 : 0) << '\n';
  }
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());
}

void write_binary(const EventStream& stream, const std::filesystem::path& path) {
  std::string buf;
  buf.reserve(kHeaderBytes + stream.events.size() * kRecordBytes);
  buf.append(kMagic.data(), kMagic.size());
  put_le<uint16_t>(buf, stream.width);
  put_le<uint16_t>(buf, stream.height);
  put_le<uint64_t>(buf, stream.events.size());
  put_le<uint64_t>(buf, static_cast<uint64_t>(stream.duration_us));
  for (const Event& e : stream.events) {
    put_le<uint64_t>(buf, static_cast<uint64_t>(e.t));
    put_le<uint16_t>(buf, e.x);
    put_le<uint16_t>(buf, e.y);
    buf.push_back(e.polarity ? 1 : 0);
    buf.append(3, '\0');
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());
}

EventStream read_binary(const std::filesystem::path& path, bool strict_order) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());

  if (data.size() < kMagic.size() ||
      std::memcmp(data.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(Errc::bad_magic, path.string() + ": not an EVS1 file");
  }
  if (data.size() < kHeaderBytes) {
    throw Error(Errc::truncated_file, path.string() + ": header truncated");
  }
  const auto width = get_le<uint16_t>(bytes + 4);
  const auto height = get_le<uint16_t>(bytes + 6);
  const auto count = get_le<uint64_t>(bytes + 8);
  const auto duration = get_le<uint64_t>(bytes + 16);

  const uint64_t payload = data.size() - kHeaderBytes;
  if (payload < count * kRecordBytes) {
    throw Error(Errc::truncated_file, path.string() + ": expected " + std::to_string(count) +
                                          " records, payload holds " +
                                          std::to_string(payload / kRecordBytes));
  }
  if (payload > count * kRecordBytes) {
    throw Error(Errc::count_mismatch, path.string() + ": " +
                                          std::to_string(payload - count * kRecordBytes) +
                                          " trailing bytes beyond declared count");
  }

  std::vector<Event> events;
  events.reserve(count);
  bool sorted = true;
  for (uint64_t i = 0; i < count; ++i) {
    const unsigned char* rec = bytes + kHeaderBytes + i * kRecordBytes;
    Event e;
    e.t = static_cast<int64_t>(get_le<uint64_t>(rec));
    e.x = get_le<uint16_t>(rec + 8);
    e.y = get_le<uint16_t>(rec + 10);
    e.polarity = rec[12] != 0;
    if (!events.empty() && e.t < events.back().t) sorted = false;
    events.push_back(e);
  }
  if (!sorted) {
    if (strict_order) {
      throw Error(Errc::unsorted_input, path.string() + ": records not sorted by timestamp");
    }
    std::cerr << "evrate: warning: " << path.string() << " records out of order, re-sorting\n";
  }

  EventStream stream = validate_stream(std::move(events), width, height);
  if (!stream.events.empty() &&
      static_cast<int64_t>(duration) < stream.events.back().t + 1) {
    throw Error(Errc::count_mismatch,
                path.string() + ": header duration is shorter than the last record");
  }
  stream.duration_us = static_cast<int64_t>(duration);
  return stream;
}

EventStream read_events(const std::filesystem::path& path, FileFormat format,
                        std::optional<uint16_t> width, std::optional<uint16_t> height,
                        bool strict_order) {
  if (format == FileFormat::auto_detect) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw Error(Errc::io_error, "cannot open " + path.string());
    std::array<char, 4> head{};
    probe.read(head.data(), head.size());
    format = (probe.gcount() == 4 && head == kMagic) ? FileFormat::binary : FileFormat::text;
  }
  return format == FileFormat::binary ? read_binary(path, strict_order)
                                      : read_text(path, width, height);
}

void write_events(const EventStream& stream, const std::filesystem::path& path,
                  FileFormat format) {
  if (format == FileFormat::text) {
    write_text(stream, path);
  } else {
    write_binary(stream, path);
  }
}

}  // namespace evrate
