#include <iostream>
int main() { std::cout << "kbench placeholder\n"; return 0; }
