#include <algorithm>
#include <fstream>

#include "sol/error.hpp"
#include "sol/pario.hpp"

namespace sol {

ChunkPipeline::ChunkPipeline(DataSource source, PipelineOptions options)
    : source_(std::move(source)), options_(options) {
  if (options_.chunk_size == 0) throw ConfigError("pipeline: chunk_size must be positive");
  if (options_.buffer_chunks == 0) throw ConfigError("pipeline: buffer_chunks must be positive");
  if (options_.workers == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    options_.workers = std::clamp<std::size_t>(hw, 1, 4);
  }
  if (source_.format != DataFormat::kBinary) {
    for (std::size_t i = 0; i < options_.workers; ++i) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }
  threads_.emplace_back([this] { reader_loop(); });
}

ChunkPipeline::~ChunkPipeline() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

std::uint64_t ChunkPipeline::skipped_lines() const {
  std::lock_guard lock(mutex_);
  return skipped_;
}

std::uint64_t ChunkPipeline::chunks_read() const {
  std::lock_guard lock(mutex_);
  return chunks_read_;
}

// Blocks until the consumer has room for one more chunk; false on shutdown.
bool ChunkPipeline::wait_for_slot() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return stop_ || in_flight_ < options_.buffer_chunks; });
  if (stop_) return false;
  ++in_flight_;
  ++chunks_read_;
  return true;
}

void ChunkPipeline::publish(std::uint64_t sequence_id, Result result) {
  {
    std::lock_guard lock(mutex_);
    done_.emplace(sequence_id, std::move(result));
  }
  cv_.notify_all();
}

void ChunkPipeline::finish_reading(std::uint64_t total) {
  {
    std::lock_guard lock(mutex_);
    total_chunks_ = total;
  }
  cv_.notify_all();
}

void ChunkPipeline::reader_loop() {
  std::uint64_t seq = 0;
  // A failure while reading becomes the result of the next sequence id, so it
  // surfaces only after every earlier chunk has been delivered.
  auto fail = [&](std::exception_ptr error) {
    {
      std::lock_guard lock(mutex_);
      ++in_flight_;
      ++chunks_read_;
    }
    Result r;
    r.chunk.sequence_id = seq;
    r.error = std::move(error);
    publish(seq, std::move(r));
    finish_reading(seq + 1);
  };

  try {
    if (source_.format == DataFormat::kBinary) {
      BinaryReader reader(source_.path);
      bool more = true;
      while (more) {
        std::vector<Example> examples;
        examples.reserve(options_.chunk_size);
        try {
          while (examples.size() < options_.chunk_size) {
            auto ex = reader.next();
            if (!ex) {
              more = false;
              break;
            }
            examples.push_back(std::move(*ex));
          }
        } catch (...) {
          if (!examples.empty()) {
            if (!wait_for_slot()) return;
            publish(seq, Result{DataChunk{seq, std::move(examples)}, nullptr});
            ++seq;
          }
          throw;
        }
        if (examples.empty()) break;
        if (!wait_for_slot()) return;
        publish(seq, Result{DataChunk{seq, std::move(examples)}, nullptr});
        ++seq;
      }
      finish_reading(seq);
      return;
    }

    std::ifstream in(source_.path, std::ios::binary);
    if (!in) throw IoError("cannot open " + source_.path.string());
    std::string line;
    std::uint64_t line_no = 0;
    if (source_.format == DataFormat::kCsv) {
      while (std::getline(in, line)) {
        ++line_no;
        if (!is_blank_record(line)) break;
      }
      if (line_no == 0 || is_blank_record(line)) throw ParseError(1, "missing csv header");
      csv_layout_ = parse_csv_header(line);
    }
    bool more = true;
    while (more) {
      Job job;
      job.lines.reserve(options_.chunk_size);
      while (job.lines.size() < options_.chunk_size) {
        if (!std::getline(in, line)) {
          more = false;
          break;
        }
        ++line_no;
        if (source_.format == DataFormat::kCsv ? line.find_first_not_of(" \t\r") ==
                                                     std::string::npos
                                               : is_blank_record(line)) {
          continue;
        }
        job.lines.emplace_back(line_no, std::move(line));
      }
      if (in.bad()) throw IoError("read error on " + source_.path.string());
      if (job.lines.empty()) break;
      if (!wait_for_slot()) return;
      job.sequence_id = seq++;
      {
        std::lock_guard lock(mutex_);
        jobs_.push_back(std::move(job));
      }
      cv_.notify_all();
    }
    finish_reading(seq);
  } catch (...) {
    fail(std::current_exception());
  }
}

void ChunkPipeline::worker_loop() {
  while (true) {
    Job job;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return stop_ || job_head_ < jobs_.size(); });
      if (stop_) return;
      job = std::move(jobs_[job_head_++]);
      if (job_head_ == jobs_.size()) {
        jobs_.clear();
        job_head_ = 0;
      }
    }
    Result r;
    r.chunk.sequence_id = job.sequence_id;
    r.chunk.examples.reserve(job.lines.size());
    std::uint64_t skipped = 0;
    try {
      for (const auto& [line_no, text] : job.lines) {
        try {
          if (source_.format == DataFormat::kCsv) {
            r.chunk.examples.push_back(parse_csv_row(text, csv_layout_, line_no));
          } else {
            r.chunk.examples.push_back(parse_libsvm_line(text, line_no));
          }
          if (r.chunk.examples.back().label < 0 ||
              static_cast<std::size_t>(r.chunk.examples.back().label) >= source_.class_count) {
            const int label = r.chunk.examples.back().label;
            r.chunk.examples.pop_back();
            throw ParseError(line_no, "label " + std::to_string(label) + " outside 0.." +
                                          std::to_string(source_.class_count - 1));
          }
        } catch (const ParseError&) {
          if (!options_.skip_bad_lines) throw;
          ++skipped;
        }
      }
    } catch (...) {
      r.error = std::current_exception();
    }
    if (skipped > 0) {
      std::lock_guard lock(mutex_);
      skipped_ += skipped;
    }
    publish(job.sequence_id, std::move(r));
  }
}

std::optional<DataChunk> ChunkPipeline::next() {
  std::unique_lock lock(mutex_);
  if (failed_) return std::nullopt;
  cv_.wait(lock, [&] {
    return done_.count(next_sequence_) > 0 ||
           (total_chunks_ && next_sequence_ >= *total_chunks_);
  });
  const auto it = done_.find(next_sequence_);
  if (it == done_.end()) return std::nullopt;
  Result r = std::move(it->second);
  done_.erase(it);
  ++next_sequence_;
  --in_flight_;
  if (r.error) {
    failed_ = true;
    stop_ = true;
    lock.unlock();
    cv_.notify_all();
    std::rethrow_exception(r.error);
  }
  lock.unlock();
  cv_.notify_all();
  return std::move(r.chunk);
}

std::vector<Example> load_all(const DataSource& source, const PipelineOptions& options) {
  ChunkPipeline pipeline(source, options);
  std::vector<Example> out;
  while (auto chunk = pipeline.next()) {
    for (auto& ex : chunk->examples) out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace sol
