#include <cstdio>

#include "steininfo/registry.hpp"

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  for (const auto& m : steininfo::registered_models())
    std::printf("%s\n", m->name().c_str());
  return 0;
}
