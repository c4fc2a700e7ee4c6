#include <stdio.h>
#include <stdlib.h>
#define SAMPLES 2000000
#define SEED 12345
int main(int argc, char *argv[])
{
    int i;
    long hits = 0;
    srand(SEED);
    for (i = 0; i < SAMPLES; i++)
    {
        double x = (double)rand() / RAND_MAX;
        double y = (double)rand() / RAND_MAX;
        if (x * x + y * y <= 1.0)
        {
            hits++;
        }
    }
    printf("pi = %.10f\n", 4.0 * hits / SAMPLES);
    return 0;
}
