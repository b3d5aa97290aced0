// sol_convert: stream a libsvm or csv file into the binary cache format.
//
//   sol_convert [-f format] input_file output.bin

#include <iostream>
#include <limits>
#include <string>

#include "sol/pario.hpp"
#include "tool_support.hpp"

namespace {

struct Args {
  std::string input;
  std::string output;
  std::string format;
  sol::PipelineOptions pipeline;
};

int run(const Args& args) {
  using namespace sol;
  const DataSource source = DataSource::from_path(
      args.input, tools::format_flag(args.format), std::numeric_limits<int>::max());
  if (!std::filesystem::exists(source.path)) throw IoError("cannot open " + args.input);
  std::uint64_t count = 0;
  {
    ChunkPipeline pipeline(source, args.pipeline);
    BinaryWriter writer(args.output);
    while (auto chunk = pipeline.next()) {
      for (const auto& ex : chunk->examples) writer.write(ex);
    }
    count = writer.finish();
  }
  if (count == 0) {
    std::filesystem::remove(args.output);
    throw Error("empty source");
  }
  std::cout << "examples: " << count << "\n";
  return tools::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Args args;
  CLI::App app{"Convert libsvm or csv data to the binary cache format.", "sol_convert"};
  app.add_option("input_file", args.input, "Input data")->required();
  app.add_option("output_file", args.output, "Binary output (.bin)")->required();
  app.add_option("-f,--format", args.format, "Input format: libsvm or csv");
  sol::tools::add_pipeline_flags(app, args.pipeline);

  if (auto code = sol::tools::parse_args(app, argc, argv)) return *code;
  return sol::tools::guarded("sol_convert", [&] { return run(args); });
}
