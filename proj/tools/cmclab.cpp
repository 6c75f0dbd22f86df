#include <iostream>

#include <CLI11.hpp>

#include "cmclab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cmclab: boundary expansions and Dirichlet solves for CMC graphs"};
  app.require_subcommand(1);
  std::string config, out = ".";
  bool plot = false;
  std::uint64_t seed = 0;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"expand", "solve the boundary expansion at the base point"},
                      {"solve", "finite-difference Dirichlet solve"},
                      {"analyze", "remainder decay rates of a stored solution"},
                      {"verify", "run an invariant suite"},
                      {"exact", "sample a closed-form solution"}};
  std::vector<CLI::App*> cmds;
  std::vector<CLI::Option*> seeds;
  for (const auto& s : subs) {
    auto* c = app.add_subcommand(s.name, s.help);
    c->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "output directory");
    c->add_flag("--plot", plot, "write SVG plots");
    seeds.push_back(c->add_option("--seed", seed, "override the config seed"));
    cmds.push_back(c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cmclab::kConfigError;
  }
  cmclab::RunOptions opt;
  opt.out_dir = out;
  opt.plot = plot;
  for (std::size_t i = 0; i < cmds.size(); ++i)
    if (cmds[i]->parsed() && seeds[i]->count() > 0) opt.seed = seed;
  for (auto* c : cmds)
    if (c->parsed()) return cmclab::run_command(c->get_name(), config, opt, std::cout, std::cerr);
  return cmclab::kConfigError;
}
