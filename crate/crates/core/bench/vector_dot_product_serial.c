#include <stdio.h>
#define N 600
int main(int argc, char *argv[])
{
    int i, n = N;
    double x[N], y[N], dot = 0.0;
    for (i = 0; i < n; i++)
    {
        x[i] = 0.25 * i;
        y[i] = 3.0 - 0.01 * i;
    }
    for (i = 0; i < n; i++)
    {
        dot += x[i] * y[i];
    }
    printf("dot = %.10f\n", dot);
    return 0;
}
