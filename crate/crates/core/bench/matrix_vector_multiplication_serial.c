#include <stdio.h>
#define N 8
int main(int argc, char *argv[])
{
    int i, j;
    double x[N], y[N];
    for (j = 0; j < N; j++)
    {
        x[j] = j + 1.0;
    }
    for (i = 0; i < N; i++)
    {
        y[i] = 0.0;
        for (j = 0; j < N; j++)
        {
            y[i] += (i + 2.0 * j) * x[j];
        }
        printf("%.4f\n", y[i]);
    }
    return 0;
}
