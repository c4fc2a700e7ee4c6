#include <mpi.h>
#include <stdio.h>
#include <stdlib.h>
#define SAMPLES 2000000
#define SEED 12345
int main(int argc, char *argv[])
{
    int rank, size, i;
    long hits = 0, total = 0;
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    srand(SEED + rank);
    for (i = rank; i < SAMPLES; i += size)
    {
        double x = (double)rand() / RAND_MAX;
        double y = (double)rand() / RAND_MAX;
        if (x * x + y * y <= 1.0)
        {
            hits++;
        }
    }
    MPI_Reduce(&hits, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0)
    {
        printf("pi = %.10f\n", 4.0 * total / SAMPLES);
    }
    MPI_Finalize();
    return 0;
}
