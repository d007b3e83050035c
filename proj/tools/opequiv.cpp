#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "opequiv/commands.hpp"

using namespace opequiv;

int main(int argc, char** argv) {
  CLI::App app{"Decide equivalence relations between bounded operators from their spectral data."};
  app.require_subcommand(1);

  std::string input, relation, delta;
  long long q_max = 0;
  bool text = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", input, "JSON document with operators \"T\" and \"S\"")->required()->check(CLI::ExistingFile);
    sub->add_option("--relation", relation, "strong or extension")->check(CLI::IsMember({"strong", "extension"}));
    sub->add_option("--delta", delta, "bucket ratio P/Q in (0,1)");
    sub->add_option("--q-max", q_max, "largest widening exponent to search")->check(CLI::PositiveNumber);
    sub->add_flag("--text", text, "human-readable report instead of JSON");
  };
  auto* decide_cmd = app.add_subcommand("decide", "decide the relation between T and S");
  auto* match_cmd = app.add_subcommand("match", "run the bucket matcher on two bucket operators");
  auto* inspect_cmd = app.add_subcommand("inspect", "print the bucket measures of T and S");
  for (auto* sub : {decide_cmd, match_cmd, inspect_cmd}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kErrorOrInconclusive;
  }

  try {
    std::ifstream file(input);
    std::stringstream buffer;
    buffer << file.rdbuf();
    Json doc;
    try {
      doc = Json::parse(buffer.str());
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::SchemaViolation, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::SchemaViolation, "at /: expected an object");
    // command-line flags override the document's options
    if (!relation.empty()) doc["options"]["relation"] = relation;
    if (!delta.empty()) doc["options"]["delta"] = delta;
    if (q_max > 0) doc["options"]["q_max"] = q_max;

    Command cmd = decide_cmd->parsed() ? Command::Decide : match_cmd->parsed() ? Command::Match : Command::Inspect;
    CommandResult result = run_command(cmd, parse_spec(doc));
    if (text) std::cout << result.text;
    else std::cout << result.report.dump(2) << "\n";
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << error_json(e).dump() << "\n";
    return kErrorOrInconclusive;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "InternalInconsistency"}, {"message", e.what()}}.dump() << "\n";
    return kErrorOrInconclusive;
  }
}
