#include <stdio.h>
#define N 40
int main(int argc, char *argv[])
{
    int i;
    long a = 0, b = 1, t, total = 0;
    for (i = 0; i < N; i++)
    {
        total += a;
        t = a + b;
        a = b;
        b = t;
    }
    printf("sum of first %d fibonacci numbers = %ld\n", N, total);
    return 0;
}
