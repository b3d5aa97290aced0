#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>

#include "sol/error.hpp"
#include "sol/pario.hpp"

namespace sol {
namespace {

constexpr char kMagic[4] = {'S', 'O', 'L', 'B'};
constexpr std::size_t kReadBlock = 1 << 16;
constexpr std::size_t kMaxVarintBytes = 10;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

std::int64_t unzigzag(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

std::uint64_t get_le(const char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= std::uint64_t{static_cast<unsigned char>(p[i])} << (8 * i);
  }
  return v;
}

}  // namespace

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  std::string header(kMagic, 4);
  put_u32(header, kBinaryVersion);
  put_u64(header, 0);
  out_.write(header.data(), static_cast<std::streamsize>(header.size()));
}

BinaryWriter::~BinaryWriter() {
  if (!finished_) {
    try {
      finish();
    } catch (...) {
    }
  }
}

void BinaryWriter::write(const Example& example) {
  if (finished_) throw IoError("binary writer already finished");
  put_varint(buffer_, zigzag(example.label));
  const auto idx = example.features.indices();
  const auto val = example.features.values();
  put_varint(buffer_, idx.size());
  FeatureId prev = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    put_varint(buffer_, i == 0 ? idx[i] : idx[i] - prev);
    prev = idx[i];
  }
  for (const float v : val) put_u32(buffer_, std::bit_cast<std::uint32_t>(v));
  ++count_;
  if (buffer_.size() >= kReadBlock) {
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
  }
}

std::uint64_t BinaryWriter::finish() {
  if (finished_) return count_;
  finished_ = true;
  out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  buffer_.clear();
  std::string count;
  put_u64(count, count_);
  out_.seekp(8);
  out_.write(count.data(), 8);
  out_.close();
  if (!out_) throw IoError("failed writing " + path_.string());
  return count_;
}

std::uint64_t write_binary(std::span<const Example> examples, const std::filesystem::path& path) {
  BinaryWriter writer(path);
  for (const auto& ex : examples) writer.write(ex);
  return writer.finish();
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open " + path.string());
  if (!fill(4)) throw CorruptionError(0, "truncated header");
  if (std::memcmp(buf_.data(), kMagic, 4) != 0) {
    throw FormatError(path.string() + ": not a binary cache (bad magic)");
  }
  if (!fill(kBinaryHeaderSize)) throw CorruptionError(end_, "truncated header");
  const auto version = static_cast<std::uint32_t>(get_le(buf_.data() + 4, 4));
  if (version != kBinaryVersion) {
    throw FormatError(path.string() + ": unsupported binary cache version " +
                      std::to_string(version));
  }
  count_ = get_le(buf_.data() + 8, 8);
  pos_ = kBinaryHeaderSize;
}

// Ensures at least need bytes are buffered from pos_; false at end of file.
bool BinaryReader::fill(std::size_t need) {
  if (end_ - pos_ >= need) return true;
  if (pos_ > 0) {
    std::memmove(buf_.data(), buf_.data() + pos_, end_ - pos_);
    base_offset_ += pos_;
    end_ -= pos_;
    pos_ = 0;
  }
  while (end_ < need && in_) {
    const std::size_t want = std::max(need, kReadBlock);
    if (buf_.size() < want) buf_.resize(want);
    in_.read(buf_.data() + end_, static_cast<std::streamsize>(buf_.size() - end_));
    end_ += static_cast<std::size_t>(in_.gcount());
  }
  return end_ - pos_ >= need;
}

std::uint64_t BinaryReader::read_varint() {
  const std::uint64_t start = base_offset_ + pos_;
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < kMaxVarintBytes; ++i) {
    if (!fill(1)) throw CorruptionError(start, "truncated varint");
    const auto byte = static_cast<unsigned char>(buf_[pos_++]);
    if (i == kMaxVarintBytes - 1 && byte > 1) throw CorruptionError(start, "varint overflow");
    v |= std::uint64_t{byte & 0x7fu} << (7 * i);
    if ((byte & 0x80u) == 0) return v;
  }
  throw CorruptionError(start, "varint too long");
}

std::optional<Example> BinaryReader::next() {
  const std::uint64_t start = base_offset_ + pos_;
  if (read_ == count_) {
    if (fill(1)) throw CorruptionError(start, "trailing bytes after " + std::to_string(count_) +
                                                  " examples");
    return std::nullopt;
  }
  if (!fill(1)) {
    throw CorruptionError(start, "truncated: header promises " + std::to_string(count_) +
                                     " examples, found " + std::to_string(read_));
  }
  Example ex;
  const std::int64_t label = unzigzag(read_varint());
  if (label < 0 || label > std::numeric_limits<int>::max()) {
    throw CorruptionError(start, "bad label " + std::to_string(label));
  }
  ex.label = static_cast<int>(label);

  const std::uint64_t nnz_offset = base_offset_ + pos_;
  const std::uint64_t nnz = read_varint();
  if (nnz > std::uint64_t{std::numeric_limits<FeatureId>::max()} + 1) {
    throw CorruptionError(nnz_offset, "bad nnz " + std::to_string(nnz));
  }
  std::vector<FeatureId> ids;
  std::vector<float> vals;
  ids.reserve(std::min<std::uint64_t>(nnz, 1 << 20));
  std::uint64_t id = 0;
  for (std::uint64_t i = 0; i < nnz; ++i) {
    const std::uint64_t at = base_offset_ + pos_;
    const std::uint64_t gap = read_varint();
    if (i > 0 && gap == 0) throw CorruptionError(at, "repeated feature index");
    id = i == 0 ? gap : id + gap;
    if (id > std::numeric_limits<FeatureId>::max()) {
      throw CorruptionError(at, "feature index out of range");
    }
    ids.push_back(static_cast<FeatureId>(id));
  }
  vals.reserve(ids.size());
  for (std::uint64_t i = 0; i < nnz; ++i) {
    const std::uint64_t at = base_offset_ + pos_;
    if (!fill(4)) throw CorruptionError(at, "truncated feature value");
    const auto v = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(buf_.data() + pos_, 4)));
    pos_ += 4;
    if (v == 0.0f) throw CorruptionError(at, "stored zero feature value");
    vals.push_back(v);
  }
  ex.features = SparseVector(std::move(ids), std::move(vals));
  ++read_;
  return ex;
}

std::vector<Example> read_binary(const std::filesystem::path& path) {
  BinaryReader reader(path);
  std::vector<Example> out;
  out.reserve(std::min<std::uint64_t>(reader.example_count(), 1 << 20));
  while (auto ex = reader.next()) out.push_back(std::move(*ex));
  return out;
}

}  // namespace sol
