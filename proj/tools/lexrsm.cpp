#include <cstdio>

int main() {
  std::puts("lexrsm: subcommands land here as modules come online");
  return 0;
}
