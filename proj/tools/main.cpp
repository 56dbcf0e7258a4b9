#include <cstdio>

int main() {
    std::puts("steincf: CLI wiring pending");
    return 0;
}
