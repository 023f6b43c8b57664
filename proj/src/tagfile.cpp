#include "qclink/tagfile.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "qclink/errors.hpp"

namespace qclink {

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

uint16_t get_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t get_u32(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

std::vector<uint8_t> encode_tag_file(const std::vector<TimeTag>& tags,
                                     uint16_t channel_count, uint64_t epoch_ps) {
  std::vector<uint8_t> out;
  out.reserve(kTagFileHeaderSize + tags.size() * kTagRecordSize);
  out.insert(out.end(), kTagFileMagic, kTagFileMagic + 4);
  put_u16(out, kTagFileVersion);
  put_u16(out, channel_count);
  put_u64(out, epoch_ps);
  put_u64(out, tags.size());
  for (const TimeTag& tag : tags) {
    put_u16(out, tag.channel);
    put_u16(out, 0);  // reserved
    put_u32(out, 0);  // flags
    put_u64(out, tag.t_ps);
  }
  return out;
}

std::vector<TimeTag> decode_tag_file(const std::vector<uint8_t>& bytes,
                                     TagFileHeader* header_out) {
  if (bytes.size() < kTagFileHeaderSize)
    throw DataError("tag file truncated: no complete header", 0);
  if (std::memcmp(bytes.data(), kTagFileMagic, 4) != 0)
    throw DataError("bad magic at byte 0 (expected \"QTT1\")", 0);

  TagFileHeader h;
  h.version = get_u16(bytes.data() + 4);
  if (h.version != kTagFileVersion)
    throw DataError("unsupported tag file version " + std::to_string(h.version), 4);
  h.channel_count = get_u16(bytes.data() + 6);
  h.epoch_ps = get_u64(bytes.data() + 8);
  h.record_count = get_u64(bytes.data() + 16);

  const size_t expected = kTagFileHeaderSize + h.record_count * kTagRecordSize;
  if (bytes.size() != expected)
    throw DataError("tag file size mismatch: header says " + std::to_string(h.record_count) +
                        " records",
                    static_cast<int64_t>(std::min(bytes.size(), expected)));

  std::vector<TimeTag> tags;
  tags.reserve(h.record_count);
  std::map<uint16_t, uint64_t> last_per_channel;
  for (uint64_t i = 0; i < h.record_count; ++i) {
    const size_t off = kTagFileHeaderSize + i * kTagRecordSize;
    const uint8_t* rec = bytes.data() + off;
    TimeTag tag;
    tag.channel = get_u16(rec);
    if (tag.channel >= h.channel_count)
      throw DataError("record " + std::to_string(i) + ": channel " +
                          std::to_string(tag.channel) + " out of range",
                      static_cast<int64_t>(off));
    if (get_u16(rec + 2) != 0 || get_u32(rec + 4) != 0)
      throw DataError("record " + std::to_string(i) + ": reserved fields must be zero",
                      static_cast<int64_t>(off));
    tag.t_ps = get_u64(rec + 8);
    const auto it = last_per_channel.find(tag.channel);
    if (it != last_per_channel.end() && tag.t_ps < it->second)
      throw DataError("record " + std::to_string(i) + ": timestamps not sorted on channel " +
                          std::to_string(tag.channel),
                      static_cast<int64_t>(off));
    last_per_channel[tag.channel] = tag.t_ps;
    tags.push_back(tag);
  }
  if (header_out) *header_out = h;
  return tags;
}

void write_tag_file(const std::string& path, const std::vector<TimeTag>& tags,
                    uint16_t channel_count, uint64_t epoch_ps) {
  const std::vector<uint8_t> bytes = encode_tag_file(tags, channel_count, epoch_ps);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::vector<TimeTag> read_tag_file(const std::string& path, TagFileHeader* header_out) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw DataError("cannot open tag file " + path);
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<uint8_t> bytes(static_cast<size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw DataError("short read from " + path);
  return decode_tag_file(bytes, header_out);
}

}  // namespace qclink
