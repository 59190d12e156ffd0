// Placeholder main; the real command-line driver lands with the cli module.
int main() { return 4; }
