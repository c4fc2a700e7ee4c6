#include <stdio.h>
int main(int argc, char *argv[])
{
    int i, n = 1000000;
    double h, x, pi = 0.0;
    h = 1.0 / n;
    for (i = 0; i < n; i++)
    {
        x = h * (i + 0.5);
        pi += 4.0 / (1.0 + x * x);
    }
    pi *= h;
    printf("pi = %.12f\n", pi);
    return 0;
}
