#pragma once

// Parallel IO: libsvm/csv parsers, the "SOLB" binary cache and the ordered
// load pipeline feeding the trainer.

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sol/sparse_vector.hpp"

namespace sol {

enum class DataFormat { kLibsvm, kCsv, kBinary };

std::string_view format_name(DataFormat format);
std::optional<DataFormat> parse_format(std::string_view name);

// .csv -> csv, .bin -> binary, anything else (.libsvm, .txt, no extension) -> libsvm.
DataFormat infer_format(const std::filesystem::path& path);

struct DataSource {
  std::filesystem::path path;
  DataFormat format = DataFormat::kLibsvm;
  std::size_t class_count = 2;

  static DataSource from_path(std::filesystem::path path,
                              std::optional<DataFormat> format = std::nullopt,
                              std::size_t class_count = 2);
};

// ---- libsvm ----------------------------------------------------------------

// "label idx:val idx:val ...". Labels are integers; -1 maps to class 0 and +1
// to class 1. Text after '#' is a comment. Throws ParseError on bad input,
// including blank lines.
Example parse_libsvm_line(std::string_view line, std::uint64_t line_no = 1);

// As parse_libsvm_line but returns nullopt for blank and comment-only lines.
std::optional<Example> parse_libsvm_record(std::string_view line, std::uint64_t line_no);

// True when the line holds no data (blank or comment only).
bool is_blank_record(std::string_view line);

// Renders an example as a libsvm line (class ids written as-is, no newline).
std::string format_libsvm(const Example& example);

// ---- csv -------------------------------------------------------------------

// Column roles decided by the header row: the column named "label" (or the
// first column when none is) holds labels, the rest become features 1..d in
// column order.
struct CsvLayout {
  std::size_t columns = 0;
  std::size_t label_column = 0;
};

CsvLayout parse_csv_header(std::string_view header);
Example parse_csv_row(std::string_view row, const CsvLayout& layout, std::uint64_t line_no);

// Whole-stream convenience; line numbers count the header as line 1.
std::vector<Example> parse_csv(std::istream& in);

// ---- binary cache ----------------------------------------------------------
//
// Header: "SOLB", u32 version = 1, u64 example count (all little-endian).
// Record: zigzag varint label, varint nnz, varint indices (first absolute,
// then gaps), nnz float32 values.

inline constexpr std::uint32_t kBinaryVersion = 1;
inline constexpr std::size_t kBinaryHeaderSize = 16;

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path);
  ~BinaryWriter();
  BinaryWriter(const BinaryWriter&) = delete;
  BinaryWriter& operator=(const BinaryWriter&) = delete;

  void write(const Example& example);
  // Back-patches the header count and closes the file; returns the count.
  std::uint64_t finish();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::string buffer_;
  std::uint64_t count_ = 0;
  bool finished_ = false;
};

std::uint64_t write_binary(std::span<const Example> examples, const std::filesystem::path& path);

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);

  std::uint64_t example_count() const { return count_; }
  // nullopt after the last record; CorruptionError on damaged input.
  std::optional<Example> next();

 private:
  bool fill(std::size_t need);
  std::uint64_t read_varint();

  std::ifstream in_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  std::uint64_t base_offset_ = 0;  // file offset of buf_[0]
  std::uint64_t count_ = 0;
  std::uint64_t read_ = 0;
};

std::vector<Example> read_binary(const std::filesystem::path& path);

// ---- pipeline --------------------------------------------------------------

struct PipelineOptions {
  std::size_t chunk_size = 1024;
  // Chunks read but not yet taken by the consumer; the reader blocks at this.
  std::size_t buffer_chunks = 16;
  // Parse workers; 0 picks min(hardware threads, 4).
  std::size_t workers = 0;
  // Count and drop unparseable lines instead of failing.
  bool skip_bad_lines = false;
};

// A reader thread splits the source into chunks, parse workers turn them into
// examples, and chunks are handed to the single consumer strictly in file
// order. Errors surface from next() in file order and stop the pipeline.
class ChunkPipeline {
 public:
  ChunkPipeline(DataSource source, PipelineOptions options = {});
  ~ChunkPipeline();
  ChunkPipeline(const ChunkPipeline&) = delete;
  ChunkPipeline& operator=(const ChunkPipeline&) = delete;

  std::optional<DataChunk> next();

  std::uint64_t skipped_lines() const;
  std::uint64_t chunks_read() const;

 private:
  struct Job {
    std::uint64_t sequence_id = 0;
    std::vector<std::pair<std::uint64_t, std::string>> lines;  // (line no, text)
  };
  struct Result {
    DataChunk chunk;
    std::exception_ptr error;
  };

  void reader_loop();
  void worker_loop();
  bool wait_for_slot();
  void publish(std::uint64_t sequence_id, Result result);
  void finish_reading(std::uint64_t total);

  DataSource source_;
  PipelineOptions options_;
  CsvLayout csv_layout_;

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<Job> jobs_;  // FIFO, consumed from the front
  std::size_t job_head_ = 0;
  std::map<std::uint64_t, Result> done_;
  std::size_t in_flight_ = 0;
  std::uint64_t chunks_read_ = 0;
  std::uint64_t skipped_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::optional<std::uint64_t> total_chunks_;
  bool stop_ = false;
  bool failed_ = false;

  std::vector<std::thread> threads_;
};

// Drains a pipeline into memory.
std::vector<Example> load_all(const DataSource& source, const PipelineOptions& options = {});

}  // namespace sol
