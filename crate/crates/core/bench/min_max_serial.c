#include <stdio.h>
#define N 500
int main(int argc, char *argv[])
{
    int i, v;
    int lo = 1000000, hi = -1000000;
    for (i = 0; i < N; i++)
    {
        v = (i * 37 + 11) % 101 - 50;
        if (v < lo)
        {
            lo = v;
        }
        if (v > hi)
        {
            hi = v;
        }
    }
    printf("min = %d max = %d\n", lo, hi);
    return 0;
}
