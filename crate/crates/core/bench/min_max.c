#include <mpi.h>
#include <stdio.h>
#define N 500
int main(int argc, char *argv[])
{
    int rank, size, i, v;
    int lo = 1000000, hi = -1000000, gmin, gmax;
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    for (i = rank; i < N; i += size)
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
    MPI_Reduce(&lo, &gmin, 1, MPI_INT, MPI_MIN, 0, MPI_COMM_WORLD);
    MPI_Reduce(&hi, &gmax, 1, MPI_INT, MPI_MAX, 0, MPI_COMM_WORLD);
    if (rank == 0)
    {
        printf("min = %d max = %d\n", gmin, gmax);
    }
    MPI_Finalize();
    return 0;
}
