#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "kmn/cli.hpp"
#include "kmn/errors.hpp"

namespace {

// One machine-readable line on stderr: error code=<tag> message="<text>".
int fail(const std::string& code, const std::string& message, int status) {
  std::string quoted;
  for (char c : message) {
    if (c == '"' || c == '\\') quoted += '\\';
    quoted += c == '\n' ? ' ' : c;
  }
  std::cerr << "error code=" << code << " message=\"" << quoted << "\"\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments with u_t + kappa (u^m)_x + delta (u^n)_xxx = 0", "kmn-lab"};
  std::string workflow, config, out;
  app.add_option("workflow", workflow, "simulate | exact-residual | symmetry-check | reduce | travel | constraint")
      ->required();
  app.add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    const auto wanted = kmn::cli::parse_workflow(workflow);
    std::ifstream in(config, std::ios::binary);
    if (!in) return fail("io", "cannot read " + config, 3);
    std::stringstream text;
    text << in.rdbuf();
    const auto scenario = kmn::cli::parse_config(text.str(), wanted);
    const auto report = kmn::cli::run(scenario, out);
    std::cout << "ok";
    for (const auto& [k, v] : report.summary) std::cout << ' ' << k << '=' << v;
    std::cout << '\n';
    return 0;
  } catch (const kmn::ParseError& e) {
    return fail(e.code(), e.what(), 2);
  } catch (const kmn::Error& e) {
    return fail(e.code(), e.what(), e.code() == "io" ? 3 : 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 4);
  }
}
