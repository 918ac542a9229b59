#include <cstdlib>
#include <iostream>

#include <httplib.h>

#include "pf/errors.hpp"
#include "pf/service.hpp"

int main(int argc, char** argv) {
  std::optional<pf::service::ServiceConfig> config;
  try {
    config = pf::service::load_config(argc, argv, [](const char* name) { return std::getenv(name); });
  } catch (const pf::Error& e) {
    std::cerr << "pf_serve: " << e.what() << '\n';
    return 2;
  }
  if (!config) return 0;

  pf::service::AnalysisService service(*config);
  httplib::Server server;
  service.mount(server);

  if (!server.bind_to_port(config->bind, config->port)) {
    std::cerr << "pf_serve: cannot bind " << config->bind << ':' << config->port << '\n';
    return 2;
  }
  std::cerr << "pf_serve listening on http://" << config->bind << ':' << config->port << '\n';
  return server.listen_after_bind() ? 0 : 2;
}
