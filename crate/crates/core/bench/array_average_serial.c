#include <stdio.h>
#define N 1000
int main(int argc, char *argv[])
{
    int i;
    double a[N], total = 0.0;
    for (i = 0; i < N; i++)
    {
        a[i] = 0.5 * i + 1.0;
    }
    for (i = 0; i < N; i++)
    {
        total += a[i];
    }
    printf("average = %.10f\n", total / N);
    return 0;
}
