#include <cstdio>

int main() {
    std::puts("cpcf: command-line interface not wired up yet");
    return 0;
}
