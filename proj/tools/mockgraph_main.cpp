// Standalone Graph-style mock server over a fixture world file.

#include <iostream>

#include <CLI11.hpp>

#include "engage/mockgraph.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Serve a fixture world as a Graph-style URL engagement endpoint", "engage-mockgraph"};
  std::string fixture;
  std::string host = "127.0.0.1";
  int port = 8089;
  app.add_option("--fixture", fixture, "Fixture world JSON")->required()->check(CLI::ExistingFile);
  app.add_option("--host", host, "Bind address")->capture_default_str();
  app.add_option("--port", port, "Port")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    auto graph = std::make_shared<engage::MockGraph>(engage::FixtureWorld::load(fixture));
    engage::MockGraphServer server(graph);
    std::cerr << "engage-mockgraph: serving " << fixture << " on http://" << host << ":" << port << "\n";
    server.serve_forever(host, port);
  } catch (const std::exception& e) {
    std::cerr << "engage-mockgraph: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
