#include <stdio.h>
#define N 10000
int main(int argc, char *argv[])
{
    int i;
    long total = 0;
    for (i = 1; i <= N; i++)
    {
        total += i;
    }
    printf("reduce = %ld gather = %ld\n", total, total);
    return 0;
}
